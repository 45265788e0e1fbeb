//! Quotients of [`MultiPoly`] without forced GCD reduction.

use std::fmt;

use num::{BigRational, One};
use serde::{Deserialize, Serialize};

use super::poly::{MultiPoly, NVARS};
use crate::error::{Error, Result};
use crate::exact_arith::Scalar;

/// `num / den` with a monic denominator (lex-leading coefficient one).
/// Equality is decided by cross-multiplication.
#[derive(Clone)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RationalFunction {}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        RationalFunction { num: p, den: MultiPoly::one() }
    }
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator("identically zero denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let m = num.monomial_content();
        let d = den.monomial_content();
        let mut common = [0; NVARS];
        for i in 0..NVARS {
            common[i] = m[i].min(d[i]);
        }
        let (num, den) = (num.div_monomial(&common), den.div_monomial(&common));
        if let Some(q) = num.div_exact(&den) {
            return q.into();
        }
        let (lc, den) = den.make_monic();
        RationalFunction { num: num.scale(&lc.recip()), den }
    }

    pub fn zero() -> Self {
        MultiPoly::zero().into()
    }

    pub fn one() -> Self {
        MultiPoly::one().into()
    }

    pub fn from_int(n: i64) -> Self {
        MultiPoly::from_int(n).into()
    }

    pub fn constant(c: BigRational) -> Self {
        MultiPoly::constant(c).into()
    }

    pub fn sym(name: &str) -> Self {
        MultiPoly::sym(name).into()
    }

    pub fn var(i: usize) -> Self {
        MultiPoly::var(i).into()
    }

    pub fn parse(num: &str, den: &str) -> Result<Self> {
        Self::new(num.parse()?, den.parse()?)
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn uses(&self, i: usize) -> bool {
        self.num.uses(i) || self.den.uses(i)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        Self::normalized(self.num.mul(&other.den).add(&other.num.mul(&self.den)), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let n = e.unsigned_abs();
        Ok(Self::normalized(base.num.pow(n), base.den.pow(n)))
    }

    /// Evaluate at a point; `ZeroDenominator` when the denominator vanishes.
    pub fn eval<S: Scalar>(&self, vals: &[Option<S>; NVARS]) -> Result<S> {
        let d = self.den.eval(vals)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator(format!("{} vanishes", self.den)));
        }
        self.num.eval(vals)?.div(&d)
    }

    /// Simultaneous substitution of every symbol by a rational function.
    pub fn substitute(&self, subs: &[RationalFunction; NVARS]) -> Result<Self> {
        let n = substitute_poly(&self.num, subs);
        let d = substitute_poly(&self.den, subs);
        let (nn, nd) = n;
        let (dn, dd) = d;
        if dn.is_zero() {
            return Err(Error::ZeroDenominator(format!("{} vanishes after substitution", self.den)));
        }
        Ok(Self::normalized(nn.mul(&dd), dn.mul(&nd)))
    }

    /// Replace `s` by `s·q^k` for each symbol (negative `k` allowed).
    pub fn shift_by_q(&self, shift: &[i64; NVARS]) -> Self {
        let mut subs: [RationalFunction; NVARS] = std::array::from_fn(Self::var);
        let q = Self::sym("q");
        for i in 0..NVARS {
            if shift[i] != 0 {
                subs[i] = Self::var(i).mul(&q.pow(shift[i] as i32).expect("q is nonzero"));
            }
        }
        self.substitute(&subs).expect("q-scaling keeps denominators nonzero")
    }

    pub fn to_json(&self) -> RationalFunctionJson {
        RationalFunctionJson { num: self.num.to_text(), den: self.den.to_text() }
    }
}

/// `Σ c·Π s_i^e_i` for `s_i = n_i/d_i`, returned as a numerator and the
/// common denominator `Π d_i^{deg_i}`.
fn substitute_poly(p: &MultiPoly, subs: &[RationalFunction; NVARS]) -> (MultiPoly, MultiPoly) {
    let degs: Vec<u32> = (0..NVARS).map(|i| p.degree_in(i)).collect();
    let mut num_pows: Vec<Vec<MultiPoly>> = Vec::new();
    let mut den_pows: Vec<Vec<MultiPoly>> = Vec::new();
    for i in 0..NVARS {
        let mut np = vec![MultiPoly::one()];
        let mut dp = vec![MultiPoly::one()];
        for k in 1..=degs[i] as usize {
            np.push(np[k - 1].mul(&subs[i].num));
            dp.push(dp[k - 1].mul(&subs[i].den));
        }
        num_pows.push(np);
        den_pows.push(dp);
    }
    let mut out = MultiPoly::zero();
    for (e, c) in p.terms() {
        let mut t = MultiPoly::constant(c.clone());
        for i in 0..NVARS {
            let d = degs[i] as usize;
            if d == 0 {
                continue;
            }
            let k = e[i] as usize;
            t = t.mul(&num_pows[i][k]).mul(&den_pows[i][d - k]);
        }
        out = out.add(&t);
    }
    let mut den = MultiPoly::one();
    for i in 0..NVARS {
        den = den.mul(&den_pows[i][degs[i] as usize]);
    }
    (out, den)
}

/// Serialized form: canonical polynomial text for numerator and denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunctionJson {
    pub num: String,
    pub den: String,
}

impl TryFrom<&RationalFunctionJson> for RationalFunction {
    type Error = Error;
    fn try_from(j: &RationalFunctionJson) -> Result<Self> {
        Self::parse(&j.num, &j.den)
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RationalFunctionJson::deserialize(d)?;
        RationalFunction::try_from(&j).map_err(serde::de::Error::custom)
    }
}

/// Parse a rational expression such as `b*q/a`, `-q^(-1)/a` or
/// `(a+1)/(b-1)`.
pub fn parse_rational_function(text: &str) -> Result<RationalFunction> {
    let mut p = RfParser { chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let out = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

struct RfParser {
    chars: Vec<char>,
    pos: usize,
}

impl RfParser {
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

    fn expr(&mut self) -> Result<RationalFunction> {
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

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| self.err("division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            let paren = self.eat('(');
            let neg = self.eat('-');
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            let n: i32 = s.parse().map_err(|_| self.err("expected exponent"))?;
            if paren && !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return base.pow(if neg { -n } else { n }).map_err(|_| self.err("negative power of zero"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
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
                Ok(RationalFunction::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let i = super::poly::symbol_index(&c.to_string()).map_err(|_| self.err("unknown symbol"))?;
                Ok(RationalFunction::var(i))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}
