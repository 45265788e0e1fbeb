//! Sparse multivariate polynomials with big-rational coefficients in the
//! fixed symbols `a, b, c, q, x, w`.
//!
//! `w` stands for a root of unity in parameter families; the relation
//! coefficients themselves only involve the first five symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{format_rational, Scalar};

pub const NVARS: usize = 6;
pub const SYMBOLS: [&str; NVARS] = ["a", "b", "c", "q", "x", "w"];

pub type Exps = [u32; NVARS];

/// Index of a symbol name in [`SYMBOLS`].
pub fn symbol_index(name: &str) -> Result<usize> {
    SYMBOLS.iter().position(|s| *s == name).ok_or_else(|| Error::Parse(format!("unknown symbol `{name}`")))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Exps, BigRational>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, [0; NVARS])
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    pub fn monomial(c: BigRational, e: Exps) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        MultiPoly { terms }
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; NVARS];
        e[i] = 1;
        Self::monomial(BigRational::one(), e)
    }

    pub fn sym(name: &str) -> Self {
        Self::var(symbol_index(name).expect("known symbol"))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&[0; NVARS]).cloned(),
            _ => None,
        }
    }

    /// Lex-leading term (`a > b > c > q > x > w`).
    pub fn leading(&self) -> Option<(&Exps, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn uses(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    fn add_term(&mut self, e: Exps, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(add_exps(ea, eb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (de, dc) = d.leading()?;
        let (de, dc) = (*de, dc.clone());
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        // Cheap rejection: every variable degree of d must fit.
        for i in 0..NVARS {
            if d.degree_in(i) > self.degree_in(i) && !self.is_zero() {
                return None;
            }
        }
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((re, rc)) = rem.leading() {
            let mut te = [0; NVARS];
            for i in 0..NVARS {
                if re[i] < de[i] {
                    return None;
                }
                te[i] = re[i] - de[i];
            }
            let tc = rc / &dc;
            for (e, c) in &d.terms {
                rem.add_term(add_exps(e, &te), -(c * &tc));
            }
            quot.add_term(te, tc);
        }
        Some(quot)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Exps {
        let mut out = [u32::MAX; NVARS];
        for e in self.terms.keys() {
            for i in 0..NVARS {
                out[i] = out[i].min(e[i]);
            }
        }
        if self.terms.is_empty() {
            [0; NVARS]
        } else {
            out
        }
    }

    /// Divide by a monomial that is known to divide every term.
    pub fn div_monomial(&self, m: &Exps) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut r = *e;
                    for i in 0..NVARS {
                        r[i] -= m[i];
                    }
                    (r, c.clone())
                })
                .collect(),
        }
    }

    /// Scale so the lex-leading coefficient is one; returns the factor removed.
    pub fn make_monic(&self) -> (BigRational, Self) {
        match self.leading() {
            None => (BigRational::one(), Self::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    /// Evaluate with `vals[i]` bound to symbol `i`; unbound symbols must not
    /// occur.
    pub fn eval<S: Scalar>(&self, vals: &[Option<S>; NVARS]) -> Result<S> {
        if S::EXACT {
            let mut rats: [Option<BigRational>; NVARS] = Default::default();
            let mut all = true;
            for i in 0..NVARS {
                if let Some(v) = &vals[i] {
                    match v.to_rational() {
                        Some(r) => rats[i] = Some(r),
                        None => all = false,
                    }
                }
            }
            if all {
                return self.eval_rational(&rats).map(|r| S::from_rational(&r));
            }
        }
        let mut powers: Vec<Vec<S>> = Vec::with_capacity(NVARS);
        for i in 0..NVARS {
            let d = self.degree_in(i) as usize;
            let mut row = vec![S::one()];
            if d > 0 {
                let v = vals[i].as_ref().ok_or_else(|| Error::UnboundSymbol(SYMBOLS[i].to_string()))?;
                for k in 1..=d {
                    row.push(row[k - 1].mul(v));
                }
            }
            powers.push(row);
        }
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_rational(c);
            for i in 0..NVARS {
                if e[i] > 0 {
                    t = t.mul(&powers[i][e[i] as usize]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Evaluation at a rational point over a common denominator, so the
    /// inner loop is integer arithmetic.
    pub fn eval_rational(&self, vals: &[Option<BigRational>; NVARS]) -> Result<BigRational> {
        let mut num_pows: Vec<Vec<BigInt>> = Vec::with_capacity(NVARS);
        let mut den_pows: Vec<Vec<BigInt>> = Vec::with_capacity(NVARS);
        let mut common = BigInt::one();
        for i in 0..NVARS {
            let d = self.degree_in(i) as usize;
            let (mut np, mut dp) = (vec![BigInt::one()], vec![BigInt::one()]);
            if d > 0 {
                let v = vals[i].as_ref().ok_or_else(|| Error::UnboundSymbol(SYMBOLS[i].to_string()))?;
                for k in 1..=d {
                    np.push(&np[k - 1] * v.numer());
                    dp.push(&dp[k - 1] * v.denom());
                }
                common *= &dp[d];
            }
            num_pows.push(np);
            den_pows.push(dp);
        }
        let mut int_acc = BigInt::zero();
        let mut rat_acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.numer().clone();
            for i in 0..NVARS {
                let d = den_pows[i].len() - 1;
                if d > 0 {
                    let k = e[i] as usize;
                    t *= &num_pows[i][k];
                    t *= &den_pows[i][d - k];
                }
            }
            if c.denom().is_one() {
                int_acc += t;
            } else {
                rat_acc += BigRational::new(t, c.denom().clone());
            }
        }
        Ok((rat_acc + BigRational::from_integer(int_acc)) / BigRational::from_integer(common))
    }

    /// Replace symbol `i` by `q^k · symbol i` for each `i`, where `shift[i] ≥ 0`.
    pub fn scale_vars_by_q(&self, shift: &[u32; NVARS]) -> Self {
        let qi = symbol_index("q").unwrap();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut ne = *e;
            for i in 0..NVARS {
                ne[qi] += shift[i] * e[i];
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Text form with terms in graded-lex descending order, e.g.
    /// `(-1)*a*b*x + c`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&Exps> = self.terms.keys().collect();
        keys.sort_by(|x, y| {
            let dx: u32 = x.iter().sum();
            let dy: u32 = y.iter().sum();
            dy.cmp(&dx).then_with(|| y.cmp(x))
        });
        let parts: Vec<String> = keys.into_iter().map(|e| term_text(e, &self.terms[e])).collect();
        parts.join(" + ")
    }
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    let mut out = *a;
    for i in 0..NVARS {
        out[i] += b[i];
    }
    out
}

fn term_text(e: &Exps, c: &BigRational) -> String {
    let mut factors = Vec::new();
    let is_const = e.iter().all(|&k| k == 0);
    if !c.is_one() || is_const {
        let s = format_rational(c);
        if c.is_negative() || !c.is_integer() {
            factors.push(format!("({s})"));
        } else {
            factors.push(s);
        }
    }
    for i in 0..NVARS {
        match e[i] {
            0 => {}
            1 => factors.push(SYMBOLS[i].to_string()),
            k => factors.push(format!("{}^{k}", SYMBOLS[i])),
        }
    }
    factors.join("*")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for MultiPoly {
    type Err = Error;

    /// Accepts sums, differences, products, integer powers, parentheses,
    /// integer literals and division by constants.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
        let out = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
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
        let s: String = self.chars.iter().collect();
        Error::Parse(format!("{what} at position {} in `{s}`", self.pos))
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = d.as_constant().ok_or_else(|| self.err("division by a non-constant"))?;
                if c.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            let n: u32 = s.parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n: num::BigInt = s.parse().map_err(|_| self.err("bad integer"))?;
                Ok(MultiPoly::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let i = symbol_index(&c.to_string()).map_err(|_| self.err("unknown symbol"))?;
                Ok(MultiPoly::var(i))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::rat;
    use crate::exact_arith::ExactScalar;

    fn p(s: &str) -> MultiPoly {
        s.parse().unwrap()
    }

    #[test]
    fn text_order_and_round_trip() {
        let f = p("c - a*b*x");
        assert_eq!(f.to_text(), "(-1)*a*b*x + c");
        assert_eq!(p(&f.to_text()), f);
        let g = p("3/2*a^2*q - x + 1 - 2*c");
        assert_eq!(g.to_text(), "(3/2)*a^2*q + (-2)*c + (-1)*x + 1");
        assert_eq!(p(&g.to_text()), g);
        assert_eq!(MultiPoly::zero().to_text(), "0");
        assert_eq!(p("-(1)").to_text(), "(-1)");
        assert!("a/x".parse::<MultiPoly>().is_err());
        assert!("a+".parse::<MultiPoly>().is_err());
        assert!("z".parse::<MultiPoly>().is_err());
    }

    #[test]
    fn exact_division() {
        let f = p("(1-a*q)*(c-a*b*x)^2*(q-x)");
        assert_eq!(f.div_exact(&p("c-a*b*x")).unwrap(), p("(1-a*q)*(c-a*b*x)*(q-x)"));
        assert_eq!(f.div_exact(&p("2*q-2*x")).unwrap(), p("(1-a*q)*(c-a*b*x)^2/2"));
        assert!(f.div_exact(&p("1-c")).is_none());
        assert!(f.div_exact(&p("a-q")).is_none());
        assert_eq!(MultiPoly::zero().div_exact(&p("a+1")).unwrap(), MultiPoly::zero());
    }

    #[test]
    fn evaluation() {
        let f = p("(1-a)*(c-a*b*x)");
        let v = |n: i64| Some(ExactScalar::from_int(n));
        let vals = [v(2), v(3), v(5), None, v(7), None];
        assert_eq!(f.eval(&vals).unwrap(), ExactScalar::from_int(37));
        assert_eq!(p("q").eval(&vals), Err(Error::UnboundSymbol("q".into())));
    }

    #[test]
    fn q_scaling() {
        let f = p("a*x^2 + c");
        let g = f.scale_vars_by_q(&[1, 0, 2, 0, 1, 0]);
        assert_eq!(g, p("a*q^3*x^2 + c*q^2"));
        assert_eq!(f.monomial_content(), [0; NVARS]);
        assert_eq!(p("a^2*x + a*x^3").monomial_content(), [1, 0, 0, 0, 1, 0]);
        let (c, m) = p("2*a - 4").make_monic();
        assert_eq!((c, m), (rat(2, 1), p("a - 2")));
    }
}
