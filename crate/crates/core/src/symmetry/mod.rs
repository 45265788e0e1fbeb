//! The symmetry group acting on `(k,l,m,n; a,b,c,x)`.
//!
//! Generators `σ0..σ3` act on both components; `σ4..σ6` are words in them.
//! On shift vectors every generator is linear, and in the coordinates
//! `λ = T(k,l,m,n) = (k, l, -n, k+l-m)` the group is a small finite group of
//! signed permutations and reflections, which makes orbit questions finite.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{RationalFunction, ShiftVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    S0,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

use Generator::*;

impl Generator {
    pub const ALL: [Generator; 7] = [S0, S1, S2, S3, S4, S5, S6];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Generator> {
        Self::ALL.get(i).copied()
    }

    /// Expansion into `σ0..σ3`; basic generators expand to themselves.
    pub fn expansion(self) -> &'static [Generator] {
        match self {
            S0 => &[S0],
            S1 => &[S1],
            S2 => &[S2],
            S3 => &[S3],
            S4 => &[S3, S2, S1, S3, S1, S2, S3],
            S5 => &[S1, S3, S1, S3, S1, S2],
            S6 => &[S1, S3, S1, S3, S1, S3],
        }
    }

    fn basic_shift(self, s: ShiftVector) -> ShiftVector {
        let ShiftVector { k, l, m, n } = s;
        match self {
            S0 => ShiftVector::new(-k, -l, -m, -n),
            S1 => ShiftVector::new(n, m - k, l + n, k),
            S2 => ShiftVector::new(-k, -l, -m, k + l - m + n),
            S3 => ShiftVector::new(l, k, m, n),
            _ => unreachable!("derived generators are expanded first"),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.index())
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t.strip_prefix('s').or_else(|| t.strip_prefix('σ')).unwrap_or(t);
        digits
            .parse::<usize>()
            .ok()
            .and_then(Generator::from_index)
            .ok_or_else(|| Error::Parse(format!("unknown generator `{s}`")))
    }
}

/// A word of generators applied left to right: the first letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GeneratorWord(pub Vec<Generator>);

impl GeneratorWord {
    pub fn identity() -> Self {
        GeneratorWord(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    /// The same word written in `σ0..σ3` only.
    pub fn expand(&self) -> Vec<Generator> {
        self.0.iter().flat_map(|g| g.expansion().iter().copied()).collect()
    }

    pub fn then(mut self, other: &GeneratorWord) -> Self {
        self.0.extend_from_slice(&other.0);
        self
    }

    pub fn apply_shift(&self, s: ShiftVector) -> ShiftVector {
        self.expand().into_iter().fold(s, |acc, g| g.basic_shift(acc))
    }

    pub fn apply(&self, p: &FullPoint) -> Result<FullPoint> {
        let mut cur = p.clone();
        for g in self.expand() {
            cur = apply_generator(g, &cur)?;
        }
        Ok(cur)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "id" {
            return Ok(GeneratorWord::identity());
        }
        t.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(GeneratorWord)
    }
}

impl Serialize for GeneratorWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GeneratorWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A shift vector together with parameters `(a, b, c, x)` as rational
/// functions in the free symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct FullPoint {
    pub shift: ShiftVector,
    pub params: [RationalFunction; 4],
}

impl FullPoint {
    pub fn new(shift: ShiftVector, params: [RationalFunction; 4]) -> Self {
        FullPoint { shift, params }
    }

    /// The point with symbolic parameters `(a, b, c, x)`.
    pub fn generic(shift: ShiftVector) -> Self {
        let params = ["a", "b", "c", "x"].map(RationalFunction::sym);
        FullPoint { shift, params }
    }
}

impl fmt::Display for FullPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ShiftVector { k, l, m, n } = self.shift;
        let [a, b, c, x] = &self.params;
        write!(f, "({k},{l},{m},{n}; {a}, {b}, {c}, {x})")
    }
}

fn undefined(g: Generator, what: &str) -> impl Fn(Error) -> Error + '_ {
    move |_| Error::UndefinedAction(format!("{g} divides by {what} = 0"))
}

/// Applies one generator; `σ4..σ6` go through their expansions.
pub fn apply_generator(g: Generator, p: &FullPoint) -> Result<FullPoint> {
    if g.expansion() != [g] {
        return GeneratorWord(vec![g]).apply(p);
    }
    let ShiftVector { k, l, m, n } = p.shift;
    let [a, b, c, x] = &p.params;
    let q = RationalFunction::sym("q");
    let qpow = |e: i64| -> RationalFunction {
        let e = i32::try_from(e).expect("shift component fits in i32");
        q.pow(e).expect("q is a nonzero symbol")
    };
    let params = match g {
        S0 => [a.mul(&qpow(k)), b.mul(&qpow(l)), c.mul(&qpow(m)), x.mul(&qpow(n))],
        S1 => [x.clone(), c.div(a).map_err(undefined(g, "a"))?, b.mul(x), a.clone()],
        S2 => [
            q.div(a).map_err(undefined(g, "a"))?,
            q.div(b).map_err(undefined(g, "b"))?,
            qpow(2).div(c).map_err(undefined(g, "c"))?,
            a.mul(b).mul(x).div(c).map_err(undefined(g, "c"))?,
        ],
        S3 => [b.clone(), a.clone(), c.clone(), x.clone()],
        _ => unreachable!(),
    };
    Ok(FullPoint { shift: g.basic_shift(p.shift), params })
}

/// Shift component of a generator.
pub fn apply_generator_shift(g: Generator, s: ShiftVector) -> ShiftVector {
    GeneratorWord(vec![g]).apply_shift(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct LambdaVector(pub [i64; 4]);

impl LambdaVector {
    /// `λ̄_i = λ4 - λ_i` for `i` in 1..=3.
    pub fn bar(&self, i: usize) -> i64 {
        assert!((1..=3).contains(&i), "bar is defined for λ1..λ3");
        self.0[3] - self.0[i - 1]
    }
}

impl From<[i64; 4]> for LambdaVector {
    fn from(v: [i64; 4]) -> Self {
        LambdaVector(v)
    }
}

impl From<LambdaVector> for [i64; 4] {
    fn from(v: LambdaVector) -> Self {
        v.0
    }
}

pub fn to_lambda(s: ShiftVector) -> LambdaVector {
    LambdaVector([s.k, s.l, -s.n, s.k + s.l - s.m])
}

pub fn from_lambda(v: LambdaVector) -> ShiftVector {
    let [l1, l2, l3, l4] = v.0;
    ShiftVector::new(l1, l2, l1 + l2 - l4, -l3)
}

type Mat4 = [[i64; 4]; 4];

const IDENTITY: Mat4 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

/// The five λ-space maps with the words realizing them:
/// negate all; swap λ1 λ2; swap λ1 λ3; (λ̄2, λ̄1, λ3, λ4); (λ̄1, λ̄2, λ̄3, λ4).
fn lambda_generators() -> [(Mat4, &'static [Generator]); 5] {
    [
        ([[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]], &[S0]),
        ([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], &[S3]),
        ([[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]], &[S4]),
        ([[0, -1, 0, 1], [-1, 0, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]], &[S5]),
        ([[-1, 0, 0, 1], [0, -1, 0, 1], [0, 0, -1, 1], [0, 0, 0, 1]], &[S0, S6]),
    ]
}

fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    out
}

fn mat_apply(a: &Mat4, v: [i64; 4]) -> [i64; 4] {
    let mut out = [0; 4];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(v).map(|(x, y)| x * y).sum();
    }
    out
}

/// Group elements in λ-space, each with a shortest word realizing it, in
/// breadth-first order from the identity.
pub fn lambda_group() -> &'static [(Mat4, GeneratorWord)] {
    static GROUP: OnceLock<Vec<(Mat4, GeneratorWord)>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = lambda_generators();
        let mut seen = HashSet::from([IDENTITY]);
        let mut out = vec![(IDENTITY, GeneratorWord::identity())];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (g, letters) in &gens {
                let m = mat_mul(g, &out[i].0);
                if seen.insert(m) {
                    let word = out[i].1.clone().then(&GeneratorWord(letters.to_vec()));
                    out.push((m, word));
                    queue.push_back(out.len() - 1);
                }
            }
        }
        out
    })
}

/// `0 <= (k+l-m)/2 <= -n <= k <= l`.
pub fn is_representative(s: ShiftVector) -> bool {
    let twice_half = s.k + s.l - s.m;
    0 <= twice_half && twice_half <= -2 * s.n && -s.n <= s.k && s.k <= s.l
}

/// The lexicographically smallest orbit member in the representative set,
/// with a word carrying `s` onto it.
pub fn canonical_representative(s: ShiftVector) -> Result<(ShiftVector, GeneratorWord)> {
    let lam = to_lambda(s).0;
    lambda_group()
        .iter()
        .map(|(m, w)| (from_lambda(LambdaVector(mat_apply(m, lam))), w))
        .filter(|(t, _)| is_representative(*t))
        .min_by_key(|(t, _)| *t)
        .map(|(t, w)| (t, w.clone()))
        .ok_or_else(|| Error::NoRepresentativeFound(s.to_string()))
}

/// All orbit members that satisfy the representative condition.
pub fn representatives_in_orbit(s: ShiftVector) -> BTreeSet<ShiftVector> {
    orbit_enumerate(s).into_iter().filter(|t| is_representative(*t)).collect()
}

/// Closure of `{s}` under the five λ-actions.
pub fn orbit_enumerate(s: ShiftVector) -> BTreeSet<ShiftVector> {
    let gens = lambda_generators();
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(t) = queue.pop_front() {
        let lam = to_lambda(t).0;
        for (g, _) in &gens {
            let u = from_lambda(LambdaVector(mat_apply(g, lam)));
            if seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(k: i64, l: i64, m: i64, n: i64) -> ShiftVector {
        ShiftVector::new(k, l, m, n)
    }

    fn grid() -> impl Iterator<Item = ShiftVector> {
        let r = -4..=4i64;
        r.clone().flat_map(move |k| {
            let r = r.clone();
            r.clone().flat_map(move |l| {
                let r = r.clone();
                r.clone().flat_map(move |m| r.clone().map(move |n| sv(k, l, m, n)))
            })
        })
    }

    #[test]
    fn sigma3_swaps() {
        let p = apply_generator(S3, &FullPoint::generic(sv(1, 2, 1, -1))).unwrap();
        assert_eq!(p.shift, sv(2, 1, 1, -1));
        assert_eq!(p.params[0], RationalFunction::sym("b"));
        assert_eq!(p.params[1], RationalFunction::sym("a"));
    }

    #[test]
    fn sigma4_fixes_121m1() {
        assert_eq!(apply_generator_shift(S4, sv(1, 2, 1, -1)), sv(1, 2, 1, -1));
    }

    #[test]
    fn sigma0_twice_is_identity_on_points() {
        let p = FullPoint::generic(sv(1, -2, 3, 2));
        let w = GeneratorWord(vec![S0, S0]);
        assert_eq!(w.apply(&p).unwrap(), p);
        let p = FullPoint::generic(sv(0, 1, 1, 0));
        assert_eq!(GeneratorWord(vec![S2, S2]).apply(&p).unwrap(), p);
    }

    #[test]
    fn derived_generators_match_closed_forms() {
        for s in grid() {
            let ShiftVector { k, l, m, n } = s;
            assert_eq!(apply_generator_shift(S4, s), sv(-n, l, m - k - n, -k));
            assert_eq!(apply_generator_shift(S5, s), sv(k - m, l - m, -m, n));
            assert_eq!(apply_generator_shift(S6, s), sv(m - l, m - k, m, k + l - m + n));
        }
    }

    #[test]
    fn sigma2_undefined_on_zero_a() {
        let zero = RationalFunction::zero();
        let p = FullPoint::new(sv(0, 1, 1, 0), [zero.clone(), RationalFunction::sym("b"), zero, RationalFunction::sym("x")]);
        assert!(matches!(apply_generator(S2, &p), Err(Error::UndefinedAction(_))));
    }

    #[test]
    fn lambda_round_trip() {
        assert_eq!(to_lambda(sv(1, 2, 1, -1)), LambdaVector([1, 2, 1, 2]));
        assert_eq!(to_lambda(sv(0, 0, 0, 2)), LambdaVector([0, 0, -2, 0]));
        for s in grid() {
            assert_eq!(from_lambda(to_lambda(s)), s);
        }
    }

    #[test]
    fn group_is_finite_and_words_are_faithful() {
        let group = lambda_group();
        assert_eq!(group.len(), 96);
        for (m, w) in group {
            for s in [sv(1, 2, 1, -1), sv(3, -1, 2, 4), sv(0, 0, 0, 2)] {
                let via_matrix = from_lambda(LambdaVector(mat_apply(m, to_lambda(s).0)));
                assert_eq!(w.apply_shift(s), via_matrix, "word {w}");
            }
        }
    }

    #[test]
    fn representative_examples() {
        assert_eq!(canonical_representative(sv(0, 1, 1, 0)).unwrap().0, sv(0, 1, 1, 0));
        assert_eq!(canonical_representative(sv(1, 2, 1, -1)).unwrap().0, sv(1, 2, 1, -1));
        let (rep, word) = canonical_representative(sv(0, 0, 0, 2)).unwrap();
        assert_eq!(rep, sv(0, 2, 2, 0));
        assert_eq!(word.apply_shift(sv(0, 0, 0, 2)), rep);
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit_enumerate(sv(0, 0, 0, 0)), BTreeSet::from([sv(0, 0, 0, 0)]));
        assert!(orbit_enumerate(sv(0, 1, 1, 0)).contains(&sv(0, -1, -1, 0)));
        assert!(orbit_enumerate(sv(0, 0, 0, 2)).contains(&sv(0, 2, 2, 0)));
    }

    #[test]
    fn word_text_round_trip() {
        let w: GeneratorWord = "s0 s6 s3".parse().unwrap();
        assert_eq!(w.0, vec![S0, S6, S3]);
        assert_eq!(w.to_string().parse::<GeneratorWord>().unwrap(), w);
        assert_eq!("id".parse::<GeneratorWord>().unwrap(), GeneratorWord::identity());
    }
}
