//! Closed-form right-hand sides: expression trees over literals, bound
//! symbols, powers of `q` and q-Pochhammer factors.
//!
//! The JSON form is externally tagged by node kind:
//!
//! ```text
//! {"qpoch": {"base": {"sym": "q"}, "step": 2, "len": "N"}}
//! {"div": [{"lit": "1"}, {"qpow": "N*(N+1)/2"}]}
//! ```
//!
//! Integer-valued positions (`qpow`, `pow` exponents and `qpoch` lengths) hold
//! integer polynomials in the bound integer symbols divided by a constant.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::qpoch_finite;
use crate::error::{Error, Result};
use crate::exact_arith::{ExactScalar, Scalar};

/// Integer polynomial in named symbols over a positive constant divisor.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IntPoly {
    source: String,
    terms: BTreeMap<BTreeMap<String, u32>, i64>,
    den: i64,
}

impl PartialEq for IntPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.den == other.den
    }
}

impl IntPoly {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = PolyParser { chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
        let terms = p.expr()?;
        let den = if p.eat('/') { p.integer()? } else { 1 };
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("trailing input in integer expression `{text}`")));
        }
        if den <= 0 {
            return Err(Error::Parse(format!("divisor must be positive in `{text}`")));
        }
        Ok(IntPoly { source: text.to_string(), terms, den })
    }

    pub fn constant(n: i64) -> Self {
        IntPoly::parse(&n.to_string()).expect("integer literal")
    }

    pub fn eval(&self, ints: &BTreeMap<String, i64>) -> Result<i64> {
        let mut total: i128 = 0;
        for (mono, c) in &self.terms {
            let mut v = *c as i128;
            for (name, e) in mono {
                let x = *ints.get(name).ok_or_else(|| Error::UnboundSymbol(name.clone()))? as i128;
                v *= x.pow(*e);
            }
            total += v;
        }
        let den = self.den as i128;
        if total % den != 0 {
            return Err(Error::InvalidDomain(format!("`{}` is not an integer here", self.source)));
        }
        i64::try_from(total / den).map_err(|_| Error::InvalidDomain(format!("`{}` overflows", self.source)))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &String> {
        self.terms.keys().flat_map(|m| m.keys())
    }
}

impl TryFrom<String> for IntPoly {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        IntPoly::parse(&s)
    }
}

impl From<IntPoly> for String {
    fn from(p: IntPoly) -> String {
        p.source
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

type Terms = BTreeMap<BTreeMap<String, u32>, i64>;

struct PolyParser {
    chars: Vec<char>,
    pos: usize,
}

impl PolyParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        let text: String = self.chars.iter().collect();
        Error::Parse(format!("{what} at position {} in `{text}`", self.pos))
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected integer"))
    }

    fn expr(&mut self) -> Result<Terms> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = add_terms(&acc, &self.term()?, 1);
            } else if self.eat('-') {
                acc = add_terms(&acc, &self.term()?, -1);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Terms> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = mul_terms(&acc, &self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Terms> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.integer()?;
            let mut acc = const_terms(1);
            for _ in 0..e {
                acc = mul_terms(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Terms> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(add_terms(&Terms::new(), &self.power()?, -1))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(const_terms(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let mut t = Terms::new();
                t.insert(BTreeMap::from([(name, 1)]), 1);
                Ok(t)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

fn const_terms(c: i64) -> Terms {
    let mut t = Terms::new();
    if c != 0 {
        t.insert(BTreeMap::new(), c);
    }
    t
}

fn add_terms(a: &Terms, b: &Terms, sign: i64) -> Terms {
    let mut out = a.clone();
    for (m, c) in b {
        let e = out.entry(m.clone()).or_insert(0);
        *e += sign * c;
        if *e == 0 {
            out.remove(m);
        }
    }
    out
}

fn mul_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            for (k, e) in mb {
                *m.entry(k.clone()).or_insert(0) += e;
            }
            let e = out.entry(m.clone()).or_insert(0);
            *e += ca * cb;
            if *e == 0 {
                out.remove(&m);
            }
        }
    }
    out
}

/// A scalar literal in the exact text format (`p/q` or `cyclo(n)[...]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Literal(pub ExactScalar);

impl TryFrom<String> for Literal {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Ok(Literal(s.parse()?))
    }
}

impl From<Literal> for String {
    fn from(l: Literal) -> String {
        l.0.to_string()
    }
}

/// Length of a q-Pochhammer factor: finite or `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PochLen {
    Finite(IntPoly),
    Infinite,
}

impl TryFrom<String> for PochLen {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        if s.trim() == "inf" {
            Ok(PochLen::Infinite)
        } else {
            Ok(PochLen::Finite(IntPoly::parse(&s)?))
        }
    }
}

impl From<PochLen> for String {
    fn from(l: PochLen) -> String {
        match l {
            PochLen::Finite(p) => p.into(),
            PochLen::Infinite => "inf".into(),
        }
    }
}

fn one_step() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormExpr {
    Lit(Literal),
    Sym(String),
    /// `q^e`.
    Qpow(IntPoly),
    /// `(base; q^step)_len`.
    Qpoch {
        base: Box<ClosedFormExpr>,
        #[serde(default = "one_step")]
        step: u32,
        len: PochLen,
    },
    Mul(Vec<ClosedFormExpr>),
    Div(Box<ClosedFormExpr>, Box<ClosedFormExpr>),
    Add(Vec<ClosedFormExpr>),
    Sub(Box<ClosedFormExpr>, Box<ClosedFormExpr>),
    Pow(Box<ClosedFormExpr>, IntPoly),
}

impl ClosedFormExpr {
    pub fn lit(x: ExactScalar) -> Self {
        ClosedFormExpr::Lit(Literal(x))
    }

    pub fn int(n: i64) -> Self {
        Self::lit(ExactScalar::from_int(n))
    }

    pub fn sym(name: &str) -> Self {
        ClosedFormExpr::Sym(name.to_string())
    }

    pub fn qpow(e: &str) -> Self {
        ClosedFormExpr::Qpow(IntPoly::parse(e).expect("valid exponent"))
    }

    pub fn qpoch(base: ClosedFormExpr, step: u32, len: &str) -> Self {
        let len = PochLen::try_from(len.to_string()).expect("valid length");
        ClosedFormExpr::Qpoch { base: Box::new(base), step, len }
    }

    pub fn div(self, other: ClosedFormExpr) -> Self {
        ClosedFormExpr::Div(Box::new(self), Box::new(other))
    }

    pub fn sub(self, other: ClosedFormExpr) -> Self {
        ClosedFormExpr::Sub(Box::new(self), Box::new(other))
    }

    pub fn pow(self, e: &str) -> Self {
        ClosedFormExpr::Pow(Box::new(self), IntPoly::parse(e).expect("valid exponent"))
    }

    pub fn neg(self) -> Self {
        ClosedFormExpr::Mul(vec![Self::int(-1), self])
    }
}

/// Values for the symbols of a closed form: integer symbols (`M`, `N`) and
/// scalar symbols (`q`, `a`, `omega`, ...).
#[derive(Clone, Debug)]
pub struct Bindings<S> {
    pub ints: BTreeMap<String, i64>,
    pub scalars: BTreeMap<String, S>,
}

impl<S> Default for Bindings<S> {
    fn default() -> Self {
        Bindings { ints: BTreeMap::new(), scalars: BTreeMap::new() }
    }
}

impl<S: Scalar> Bindings<S> {
    pub fn with_int(mut self, name: &str, v: i64) -> Self {
        self.ints.insert(name.to_string(), v);
        self
    }

    pub fn with_scalar(mut self, name: &str, v: S) -> Self {
        self.scalars.insert(name.to_string(), v);
        self
    }

    fn scalar(&self, name: &str) -> Result<S> {
        if let Some(v) = self.scalars.get(name) {
            return Ok(v.clone());
        }
        if let Some(n) = self.ints.get(name) {
            return Ok(S::from_int(*n));
        }
        Err(Error::UnboundSymbol(name.to_string()))
    }
}

/// Evaluate bottom-up. Infinite products are only available for numeric
/// scalars; `tol` is their truncation tolerance.
pub fn closed_form_eval<S: Scalar>(e: &ClosedFormExpr, bindings: &Bindings<S>, tol: f64) -> Result<S> {
    use ClosedFormExpr::*;
    Ok(match e {
        Lit(l) => S::from_exact(&l.0),
        Sym(name) => bindings.scalar(name)?,
        Qpow(p) => bindings.scalar("q")?.pow(p.eval(&bindings.ints)?)?,
        Qpoch { base, step, len } => {
            let base = closed_form_eval(base, bindings, tol)?;
            let q = bindings.scalar("q")?.pow(*step as i64)?;
            match len {
                PochLen::Finite(p) => {
                    let n = p.eval(&bindings.ints)?;
                    if n < 0 {
                        return Err(Error::InvalidDomain(format!("negative q-Pochhammer length {n}")));
                    }
                    qpoch_finite(&base, &q, n as usize)
                }
                PochLen::Infinite => S::qpoch_infinite(&base, &q, tol)?,
            }
        }
        Mul(items) => {
            let mut acc = S::one();
            for it in items {
                acc = acc.mul(&closed_form_eval(it, bindings, tol)?);
            }
            acc
        }
        Add(items) => {
            let mut acc = S::zero();
            for it in items {
                acc = acc.add(&closed_form_eval(it, bindings, tol)?);
            }
            acc
        }
        Sub(x, y) => closed_form_eval(x, bindings, tol)?.sub(&closed_form_eval(y, bindings, tol)?),
        Div(x, y) => {
            let den = closed_form_eval(y, bindings, tol)?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator(format!("{y:?}")));
            }
            closed_form_eval(x, bindings, tol)?.div(&den)?
        }
        Pow(x, p) => {
            let base = closed_form_eval(x, bindings, tol)?;
            let n = p.eval(&bindings.ints)?;
            if n < 0 && base.is_zero() {
                return Err(Error::ZeroDenominator("negative power of zero".into()));
            }
            base.pow(n)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::rat;
    use crate::exact_arith::ApproxScalar;
    use ClosedFormExpr as E;

    fn ex(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_rational(rat(n, d))
    }

    #[test]
    fn int_poly_parsing() {
        let p = IntPoly::parse("N*(N+1)/2").unwrap();
        let ints = BTreeMap::from([("N".to_string(), 4)]);
        assert_eq!(p.eval(&ints).unwrap(), 10);
        assert_eq!(IntPoly::parse("-2*N-M-1").unwrap().eval(&BTreeMap::from([("N".into(), 2), ("M".into(), 3)])).unwrap(), -8);
        assert_eq!(IntPoly::parse("(N-1)^2").unwrap().eval(&ints).unwrap(), 9);
        assert!(IntPoly::parse("N/0").is_err());
        assert!(IntPoly::parse("N+").is_err());
        assert!(IntPoly::parse("N/2").unwrap().eval(&BTreeMap::from([("N".into(), 3)])).is_err());
        assert_eq!(IntPoly::parse("N").unwrap().eval(&BTreeMap::new()), Err(Error::UnboundSymbol("N".into())));
        assert_eq!(IntPoly::parse("N*(N+1)/2").unwrap(), IntPoly::parse("(N + N^2)/2").unwrap());
    }

    #[test]
    fn empty_product_is_one() {
        let e = E::Mul(vec![E::qpoch(E::sym("q"), 1, "0"), E::qpoch(E::int(5), 3, "N-N")]);
        let b = Bindings::default().with_scalar("q", ex(1, 2)).with_int("N", 7);
        assert_eq!(closed_form_eval(&e, &b, 0.0).unwrap(), ExactScalar::one());
    }

    #[test]
    fn first_value_family_at_m0_n1() {
        // (-q^{M+2};q)_N (q;q^2)_N / (q^{M+N+2};q)_N
        let e = E::Mul(vec![E::qpoch(E::qpow("M+2").neg(), 1, "N"), E::qpoch(E::sym("q"), 2, "N")])
            .div(E::qpoch(E::qpow("M+N+2"), 1, "N"));
        let b = Bindings::default().with_scalar("q", ex(1, 2)).with_int("M", 0).with_int("N", 1);
        assert_eq!(closed_form_eval(&e, &b, 0.0).unwrap(), ex(5, 7));
    }

    #[test]
    fn cube_root_value_at_n1() {
        // (1-ω^{N+1})/(1-ω) · (q^{-N};q)_N / (ω q^{-N};q)_N
        let omega = E::sym("omega");
        let e = E::Mul(vec![
            E::int(1).sub(omega.clone().pow("N+1")).div(E::int(1).sub(omega.clone())),
            E::qpoch(E::qpow("-N"), 1, "N").div(E::qpoch(E::Mul(vec![omega, E::qpow("-N")]), 1, "N")),
        ]);
        let b = Bindings::default().with_scalar("q", ex(1, 2)).with_scalar("omega", ExactScalar::zeta(3)).with_int("N", 1);
        let v = closed_form_eval(&e, &b, 0.0).unwrap();
        let w = ExactScalar::zeta(3);
        assert_eq!(v, ExactScalar::one().add(&w.scale(&rat(3, 1))).scale(&rat(-1, 7)));
    }

    #[test]
    fn errors() {
        let b: Bindings<ExactScalar> = Bindings::default().with_scalar("q", ex(1, 2));
        assert!(matches!(closed_form_eval(&E::qpoch(E::sym("q"), 1, "inf"), &b, 1e-12), Err(Error::InvalidDomain(_))));
        assert!(matches!(closed_form_eval(&E::int(1).div(E::int(0)), &b, 0.0), Err(Error::ZeroDenominator(_))));
        assert_eq!(closed_form_eval(&E::sym("a"), &b, 0.0), Err(Error::UnboundSymbol("a".into())));
        let nb: Bindings<ApproxScalar> = Bindings::default().with_scalar("q", ApproxScalar::from_int(2));
        assert!(matches!(closed_form_eval(&E::qpoch(E::int(1), 1, "inf"), &nb, 1e-12), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn json_shape() {
        let e = E::qpoch(E::sym("q"), 2, "inf").div(E::qpow("N*(N+1)/2"));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"div":[{"qpoch":{"base":{"sym":"q"},"step":2,"len":"inf"}},{"qpow":"N*(N+1)/2"}]}"#);
        let back: ClosedFormExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        let lit: ClosedFormExpr = serde_json::from_str(r#"{"lit":"cyclo(3)[0, 1]"}"#).unwrap();
        assert_eq!(lit, E::lit(ExactScalar::zeta(3)));
        assert!(serde_json::from_str::<ClosedFormExpr>(r#"{"qpow":"N+"}"#).is_err());
    }
}
