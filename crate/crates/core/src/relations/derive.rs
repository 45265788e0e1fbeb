//! Derivation of `(Q, R)` for an arbitrary shift vector.
//!
//! The candidate is built symbolically by walking from `(a, b, c, x)` to
//! `(aq^k, bq^l, cq^m, xq^n)` one elementary step at a time. Each step is a
//! 2×2 matrix acting on the pair `(φ(P), φ(P⁺))`, `P⁺ = (aq, bq, cq, x)`.
//! Fractions are kept with factored denominators so that cancellation only
//! needs exact trial division.
//!
//! The candidate is then checked independently: at several random rational
//! points the polynomials `P0, P1, P2` in `x` are recovered from series
//! coefficients by exact linear algebra and compared with it.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{MultiPoly, NVARS};
use super::ratfunc::RationalFunction;
use super::{ShiftVector, ThreeTermRelation};
use crate::error::{Error, Result};
use crate::exact_arith::rational::rat;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const Q: usize = 3;
const X: usize = 4;

/// Numerator over a product of registered irreducible-ish factors.
#[derive(Clone, Debug)]
struct Frac {
    num: MultiPoly,
    den: BTreeMap<usize, u32>,
}

#[derive(Default)]
struct Ctx {
    atoms: Vec<MultiPoly>,
    roots: Vec<Option<[u64; NVARS]>>,
}

impl Ctx {
    fn atom_of(&mut self, p: MultiPoly) -> usize {
        if let Some(i) = self.atoms.iter().position(|a| *a == p) {
            return i;
        }
        self.roots.push(modp::root_point(&p));
        self.atoms.push(p);
        self.atoms.len() - 1
    }

    /// False only when `atoms[id]` certainly does not divide the polynomial
    /// whose image is `img`.
    fn may_divide(&self, img: &modp::Image, id: usize) -> bool {
        match &self.roots[id] {
            Some(pt) => img.eval(pt) == 0,
            None => true,
        }
    }

    /// `p = c · Π atoms^mult`.
    fn factor(&mut self, p: &MultiPoly) -> (BigRational, BTreeMap<usize, u32>) {
        let mut mults = BTreeMap::new();
        let content = p.monomial_content();
        let mut rest = p.div_monomial(&content);
        for (i, &e) in content.iter().enumerate() {
            if e > 0 {
                let id = self.atom_of(MultiPoly::var(i));
                *mults.entry(id).or_insert(0) += e;
            }
        }
        let mut img = modp::Image::new(&rest);
        for id in 0..self.atoms.len() {
            if rest.as_constant().is_some() {
                break;
            }
            if self.atoms[id].len() == 1 {
                continue;
            }
            while self.may_divide(&img, id) {
                let Some(quot) = rest.div_exact(&self.atoms[id]) else { break };
                rest = quot;
                img = modp::Image::new(&rest);
                *mults.entry(id).or_insert(0) += 1;
            }
        }
        while let Some((bin, quot)) = split_binomial(&rest) {
            let (lc, monic) = bin.make_monic();
            let id = self.atom_of(monic);
            *mults.entry(id).or_insert(0) += 1;
            rest = quot.scale(&lc);
        }
        let c = match rest.as_constant() {
            Some(c) => c,
            None => {
                let (lc, monic) = rest.make_monic();
                let id = self.atom_of(monic);
                *mults.entry(id).or_insert(0) += 1;
                lc
            }
        };
        (c, mults)
    }

    fn expand(&self, den: &BTreeMap<usize, u32>) -> MultiPoly {
        let mut out = MultiPoly::one();
        for (&id, &e) in den {
            out = out.mul(&self.atoms[id].pow(e));
        }
        out
    }

    fn cancel(&self, mut f: Frac) -> Frac {
        if f.num.is_zero() {
            f.den.clear();
            return f;
        }
        let ids: Vec<usize> = f.den.keys().copied().collect();
        let mut img = modp::Image::new(&f.num);
        for id in ids {
            while f.den[&id] > 0 && self.may_divide(&img, id) {
                let Some(qt) = f.num.div_exact(&self.atoms[id]) else { break };
                f.num = qt;
                img = modp::Image::new(&f.num);
                *f.den.get_mut(&id).unwrap() -= 1;
            }
        }
        f.den.retain(|_, m| *m > 0);
        f
    }

    fn poly(&self, p: MultiPoly) -> Frac {
        Frac { num: p, den: BTreeMap::new() }
    }

    fn int(&self, n: i64) -> Frac {
        self.poly(MultiPoly::from_int(n))
    }

    fn mul(&self, a: &Frac, b: &Frac) -> Frac {
        let mut den = a.den.clone();
        for (&id, &e) in &b.den {
            *den.entry(id).or_insert(0) += e;
        }
        self.cancel(Frac { num: a.num.mul(&b.num), den })
    }

    fn add(&self, a: &Frac, b: &Frac) -> Frac {
        let mut den = a.den.clone();
        for (&id, &e) in &b.den {
            let m = den.entry(id).or_insert(0);
            *m = (*m).max(e);
        }
        let lift = |f: &Frac| {
            let mut extra = BTreeMap::new();
            for (&id, &e) in &den {
                let have = f.den.get(&id).copied().unwrap_or(0);
                if e > have {
                    extra.insert(id, e - have);
                }
            }
            f.num.mul(&self.expand(&extra))
        };
        self.cancel(Frac { num: lift(a).add(&lift(b)), den })
    }

    fn neg(&self, a: &Frac) -> Frac {
        Frac { num: a.num.neg(), den: a.den.clone() }
    }

    fn sub(&self, a: &Frac, b: &Frac) -> Frac {
        self.add(a, &self.neg(b))
    }

    fn inv(&mut self, a: &Frac) -> Result<Frac> {
        if a.num.is_zero() {
            return Err(Error::UndefinedAction("inverting an identically zero coefficient".into()));
        }
        let (c, mults) = self.factor(&a.num);
        let num = self.expand(&a.den).scale(&c.recip());
        Ok(self.cancel(Frac { num, den: mults }))
    }

    /// `q^k` for any integer `k`.
    fn qpow(&mut self, k: i64) -> Frac {
        let p = MultiPoly::var(Q).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            self.poly(p)
        } else {
            let f = self.poly(p);
            self.inv(&f).expect("q^k is nonzero")
        }
    }

    /// Symbol `i` times `q^k`.
    fn shifted_var(&mut self, i: usize, k: i64) -> Frac {
        let qk = self.qpow(k);
        self.mul(&self.poly(MultiPoly::var(i)), &qk)
    }

    fn to_rational_function(&self, f: &Frac) -> RationalFunction {
        RationalFunction::new(f.num.clone(), self.expand(&f.den)).expect("product of atoms is nonzero")
    }
}

/// Images of polynomials modulo the prime `2^61 - 1`, used to rule out
/// divisibility cheaply: if `t` is linear in some symbol `v`, then `t | p`
/// forces `p` to vanish wherever `t` does.
mod modp {
    use num::{BigInt, BigRational, Integer, ToPrimitive};

    use super::super::poly::{Exps, MultiPoly, NVARS};

    const P: u64 = (1 << 61) - 1;
    const BASE: [u64; NVARS] = [0x1_d2c3_b4a5_9687, 0x2_e3d4_c5b6_a798, 0x3_f4e5_d6c7_b8a9, 0x4_a5b6_c7d8_e9f1, 0x5_b6c7_d8e9_fa02, 0x6_c7d8_e9fa_0b13];

    fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn pow(mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn inv(a: u64) -> Option<u64> {
        (a != 0).then(|| pow(a, P - 2))
    }

    fn int_mod(n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(P)).to_u64().expect("reduced residue")
    }

    fn rat_mod(r: &BigRational) -> Option<u64> {
        inv(int_mod(r.denom())).map(|d| mul(int_mod(r.numer()), d))
    }

    pub struct Image {
        terms: Vec<(Exps, u64)>,
        degs: Exps,
    }

    impl Image {
        pub fn new(p: &MultiPoly) -> Self {
            let terms = p.terms().map(|(e, c)| (*e, rat_mod(c).unwrap_or(0))).collect();
            let degs = std::array::from_fn(|i| p.degree_in(i));
            Image { terms, degs }
        }

        pub fn eval(&self, pt: &[u64; NVARS]) -> u64 {
            let pows: Vec<Vec<u64>> = (0..NVARS)
                .map(|i| {
                    let mut row = vec![1u64];
                    for k in 1..=self.degs[i] as usize {
                        row.push(mul(row[k - 1], pt[i]));
                    }
                    row
                })
                .collect();
            let mut acc = 0u64;
            for (e, c) in &self.terms {
                let mut t = *c;
                for i in 0..NVARS {
                    t = mul(t, pows[i][e[i] as usize]);
                }
                acc = (acc + t) % P;
            }
            acc
        }
    }

    /// Nullity of a rational matrix reduced mod p; an upper bound for the
    /// nullity over the rationals. `None` if a denominator vanishes mod p.
    pub fn nullity(rows: &[Vec<BigRational>], ncols: usize) -> Option<usize> {
        let mut m: Vec<Vec<u64>> = Vec::with_capacity(rows.len());
        for row in rows {
            m.push(row.iter().map(rat_mod).collect::<Option<Vec<u64>>>()?);
        }
        let mut r = 0;
        for col in 0..ncols {
            let Some(p) = (r..m.len()).find(|&i| m[i][col] != 0) else { continue };
            m.swap(r, p);
            let pinv = inv(m[r][col]).expect("nonzero pivot");
            let pivot: Vec<u64> = m[r].iter().map(|&v| mul(v, pinv)).collect();
            for row in m.iter_mut().skip(r + 1) {
                let f = row[col];
                if f != 0 {
                    for j in col..ncols {
                        row[j] = (row[j] + P - mul(f, pivot[j])) % P;
                    }
                }
            }
            r += 1;
            if r == m.len() {
                break;
            }
        }
        Some(ncols - r)
    }

    /// A point where `t` vanishes, found by solving for a symbol of degree
    /// one at otherwise fixed pseudo-random values.
    pub fn root_point(t: &MultiPoly) -> Option<[u64; NVARS]> {
        for v in 0..NVARS {
            if t.degree_in(v) != 1 {
                continue;
            }
            let (mut alpha, mut beta) = (MultiPoly::zero(), MultiPoly::zero());
            for (e, c) in t.terms() {
                let mut e2 = *e;
                e2[v] = 0;
                let m = MultiPoly::monomial(c.clone(), e2);
                if e[v] == 1 {
                    alpha = alpha.add(&m);
                } else {
                    beta = beta.add(&m);
                }
            }
            let a = Image::new(&alpha).eval(&BASE);
            let Some(ai) = inv(a) else { continue };
            let b = Image::new(&beta).eval(&BASE);
            let mut pt = BASE;
            pt[v] = mul((P - b) % P, ai);
            return Some(pt);
        }
        None
    }
}

/// Find a binomial factor `t_i/g - t_j/g` (g the monomial gcd) of `p`.
/// Determinants of the step matrices factor this way.
fn split_binomial(p: &MultiPoly) -> Option<(MultiPoly, MultiPoly)> {
    if p.as_constant().is_some() || p.len() < 3 || p.len() > 64 {
        return None;
    }
    let terms: Vec<(&super::poly::Exps, &BigRational)> = p.terms().collect();
    let img = modp::Image::new(p);
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let (ei, ci) = terms[i];
            let (ej, cj) = terms[j];
            let mut g = [0u32; NVARS];
            for v in 0..NVARS {
                g[v] = ei[v].min(ej[v]);
            }
            let mut bi = *ei;
            let mut bj = *ej;
            for v in 0..NVARS {
                bi[v] -= g[v];
                bj[v] -= g[v];
            }
            let bin = MultiPoly::monomial(ci.clone(), bi).add(&MultiPoly::monomial(cj.clone(), bj));
            if modp::root_point(&bin).is_some_and(|pt| img.eval(&pt) != 0) {
                continue;
            }
            if let Some(q) = p.div_exact(&bin) {
                if q.as_constant().is_none() {
                    return Some((bin, q));
                }
            }
        }
    }
    None
}

/// Point `(aq^pa, bq^pb, cq^pc, xq^px)` relative to the base parameters.
type Pt = [i64; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Move {
    AUp,
    BUp,
    CDown,
    XUp,
}

impl Move {
    fn delta(self) -> Pt {
        match self {
            Move::AUp => [1, 0, 0, 0],
            Move::BUp => [0, 1, 0, 0],
            Move::CDown => [0, 0, -1, 0],
            Move::XUp => [0, 0, 0, 1],
        }
    }
}

fn plus(p: Pt, d: Pt) -> Pt {
    [p[0] + d[0], p[1] + d[1], p[2] + d[2], p[3] + d[3]]
}

type Mat = [[Frac; 2]; 2];

struct Walker {
    ctx: Ctx,
}

impl Walker {
    fn params(&mut self, p: Pt) -> [Frac; 4] {
        [
            self.ctx.shifted_var(A, p[0]),
            self.ctx.shifted_var(B, p[1]),
            self.ctx.shifted_var(C, p[2]),
            self.ctx.shifted_var(X, p[3]),
        ]
    }

    fn one_minus(&self, f: &Frac) -> Frac {
        self.ctx.sub(&self.ctx.int(1), f)
    }

    /// `num / Π dens`, inverting each factor on its own so the atom table
    /// only sees small factors.
    fn quot(&mut self, num: Frac, dens: &[Frac]) -> Result<Frac> {
        let mut out = num;
        for d in dens {
            let di = self.ctx.inv(d)?;
            out = self.ctx.mul(&out, &di);
        }
        Ok(out)
    }

    /// `φ(P·e) = φ(P) + g·φ(P⁺)`.
    fn g(&mut self, e: Move, p: Pt) -> Result<Frac> {
        let [a, b, c, x] = self.params(p);
        let ctx = &self.ctx;
        let (oa, ob, oc) = (self.one_minus(&a), self.one_minus(&b), self.one_minus(&c));
        let num = match e {
            Move::AUp => ctx.mul(&ctx.mul(&a, &x), &ob),
            Move::BUp => ctx.mul(&ctx.mul(&b, &x), &oa),
            Move::CDown => ctx.mul(&ctx.mul(&c, &x), &ctx.mul(&oa, &ob)),
            Move::XUp => ctx.neg(&ctx.mul(&x, &ctx.mul(&oa, &ob))),
        };
        match e {
            Move::CDown => {
                let qmc = ctx.sub(&ctx.poly(MultiPoly::var(Q)), &c);
                self.quot(num, &[qmc, oc])
            }
            _ => self.quot(num, &[oc]),
        }
    }

    /// `φ(P⁺⁺) = u·φ(P) + v·φ(P⁺)`, from
    /// `φ⁺⁺ = (φ⁺ - φ⁺(xq)) / (κ⁺x)`, `κ⁺ = (1-aq)(1-bq)/(1-cq)`.
    fn second_shift(&mut self, p: Pt) -> Result<(Frac, Frac)> {
        let [a, b, c, x] = self.params(p);
        let ctx = &self.ctx;
        let q = ctx.poly(MultiPoly::var(Q));
        let aq = ctx.mul(&a, &q);
        let bq = ctx.mul(&b, &q);
        let cq = ctx.mul(&c, &q);
        let abqx = ctx.mul(&ctx.mul(&a, &bq), &x);
        let c_abqx = ctx.sub(&c, &abqx);
        let kp_den = self.one_minus(&cq);
        let u_num = ctx.mul(&self.one_minus(&c), &kp_den);
        let ab = ctx.mul(&a, &b);
        let s = ctx.sub(&ctx.add(&a, &b), &ab);
        let v_inner = ctx.add(&ctx.sub(&c_abqx, &ctx.int(1)), &ctx.mul(&s, &x));
        let v_num = ctx.mul(&v_inner, &kp_den);
        let dens = [c_abqx, self.one_minus(&aq), self.one_minus(&bq), x];
        let u = self.quot(u_num, &dens)?;
        let v = self.quot(v_num, &dens)?;
        Ok((u, v))
    }

    /// Maps `(φ(P), φ(P⁺))` to `(φ(P·e), φ(P·e⁺))`.
    fn step_matrix(&mut self, e: Move, p: Pt) -> Result<Mat> {
        let g0 = self.g(e, p)?;
        let g1 = self.g(e, plus(p, [1, 1, 1, 0]))?;
        let (u, v) = self.second_shift(p)?;
        let ctx = &self.ctx;
        let m10 = ctx.mul(&g1, &u);
        let m11 = ctx.add(&ctx.int(1), &ctx.mul(&g1, &v));
        Ok([[ctx.int(1), g0], [m10, m11]])
    }

    fn inverse(&mut self, m: &Mat) -> Result<Mat> {
        let ctx = &self.ctx;
        let det = ctx.sub(&ctx.mul(&m[0][0], &m[1][1]), &ctx.mul(&m[0][1], &m[1][0]));
        let di = self.ctx.inv(&det)?;
        let ctx = &self.ctx;
        Ok([
            [ctx.mul(&m[1][1], &di), ctx.neg(&ctx.mul(&m[0][1], &di))],
            [ctx.neg(&ctx.mul(&m[1][0], &di)), ctx.mul(&m[0][0], &di)],
        ])
    }

    fn mat_mul(&self, x: &Mat, y: &Mat) -> Mat {
        let c = &self.ctx;
        let e = |i: usize, j: usize| c.add(&c.mul(&x[i][0], &y[0][j]), &c.mul(&x[i][1], &y[1][j]));
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }
}

/// Symbolic candidate for `(Q, R)` by composing elementary steps.
pub(crate) fn compose_relation(shift: ShiftVector) -> Result<(RationalFunction, RationalFunction)> {
    let mut w = Walker { ctx: Ctx::default() };
    let target = [shift.k, shift.l, shift.m, shift.n];
    let moves = [Move::AUp, Move::BUp, Move::CDown, Move::XUp];
    let mut p: Pt = [0; 4];
    let mut s: Mat = [[w.ctx.int(1), w.ctx.int(0)], [w.ctx.int(0), w.ctx.int(1)]];
    while p != target {
        for (i, &mv) in moves.iter().enumerate() {
            if p[i] == target[i] {
                continue;
            }
            let d = mv.delta();
            let forward = (target[i] - p[i]).signum() == d[i].signum();
            let m = if forward {
                let m = w.step_matrix(mv, p)?;
                p = plus(p, d);
                m
            } else {
                let back = [-d[0], -d[1], -d[2], -d[3]];
                let from = plus(p, back);
                let m = w.step_matrix(mv, from)?;
                p = from;
                w.inverse(&m)?
            };
            s = w.mat_mul(&m, &s);
        }
    }
    Ok((w.ctx.to_rational_function(&s[0][1]), w.ctx.to_rational_function(&s[0][0])))
}

/// Options for [`qr_derive_with`].
#[derive(Clone, Debug)]
pub struct DeriveOptions {
    /// Largest x-degree tried for the cleared coefficients `P0, P1, P2`.
    pub degree_budget: u32,
    /// Number of random rational points used for series matching.
    pub points: usize,
    /// Number of random points for the numeric residual check.
    pub residual_points: usize,
    pub seed: u64,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions { degree_budget: super::DEFAULT_DEGREE_BUDGET, points: 5, residual_points: 20, seed: 0x5eed }
    }
}

/// Derive and verify the relation for `shift`.
pub fn qr_derive_with(shift: ShiftVector, opts: &DeriveOptions) -> Result<ThreeTermRelation> {
    if shift.is_zero() {
        return Ok(ThreeTermRelation { shift, q: RationalFunction::zero(), r: RationalFunction::one() });
    }
    let (q, r) = compose_relation(shift)?;
    let rel = ThreeTermRelation { shift, q, r };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ shift_hash(shift));
    let mut done = 0;
    let mut attempts = 0;
    while done < opts.points {
        attempts += 1;
        if attempts > 50 * opts.points {
            return Err(Error::SamplingExhausted { attempts });
        }
        let pt = random_exact_point(&mut rng);
        match series_match(&rel, &pt, opts.degree_budget)? {
            MatchOutcome::Agrees => done += 1,
            MatchOutcome::Degenerate => continue,
        }
    }
    super::check_residuals(&rel, opts.residual_points, opts.seed)?;
    Ok(rel)
}

fn shift_hash(s: ShiftVector) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for v in [s.k, s.l, s.m, s.n] {
        h = (h ^ v as u64).wrapping_mul(0x100000001b3);
    }
    h
}

/// Random `(a, b, c, q)` with small-height coordinates, avoiding the
/// degenerate loci `a = 1`, `b = 1`, `c ∈ q^{-ℕ}`.
fn random_exact_point(rng: &mut ChaCha8Rng) -> [BigRational; 4] {
    let mut pick = |lo: i64| {
        let den = rng.gen_range(2..=9i64);
        let mut num = rng.gen_range(lo..=2 * den);
        if num == 0 || num == den {
            num += 1;
        }
        rat(num, den)
    };
    let a = pick(-9);
    let b = pick(-9);
    let c = pick(-9);
    let qd = rng.gen_range(2..=5i64);
    let qn = rng.gen_range(1..qd);
    let q = rat(if rng.gen_bool(0.5) { qn } else { -qn }, qd);
    [a, b, c, q]
}

enum MatchOutcome {
    Agrees,
    Degenerate,
}

fn pow_rat(r: &BigRational, k: i64) -> BigRational {
    crate::exact_arith::rational::rat_pow(r, k).expect("nonzero base")
}

/// Coefficients `t_j` of `φ(a,b;c;q,x) = Σ t_j x^j`, `j < order`.
fn series_coeffs(a: &BigRational, b: &BigRational, c: &BigRational, q: &BigRational, order: usize) -> Option<Vec<BigRational>> {
    let one = BigRational::one();
    let mut out = Vec::with_capacity(order);
    let mut t = one.clone();
    let mut qj = one.clone();
    for _ in 0..order {
        out.push(t.clone());
        let den = (&one - &qj * q) * (&one - c * &qj);
        if den.is_zero() {
            return None;
        }
        t = t * (&one - a * &qj) * (&one - b * &qj) / den;
        qj *= q;
    }
    Some(out)
}

fn series_match(rel: &ThreeTermRelation, pt: &[BigRational; 4], budget: u32) -> Result<MatchOutcome> {
    let [a, b, c, q] = pt;
    let s = rel.shift;
    // Skip points on the loci where a series terminates or loses a pole,
    // and where c/a or c/b in q^Z makes the basis series rationally
    // dependent.
    let on_q_lattice = |v: &BigRational| -> bool {
        v.is_zero() || (-80..=80).any(|j| (v * pow_rat(q, j)).is_one())
    };
    if [a, b, c, &(c / a), &(c / b)].into_iter().any(on_q_lattice) {
        return Ok(MatchOutcome::Degenerate);
    }
    let mut order_scale = 1;
    for attempt in 0..2 {
        let mut found = None;
        for d in 0..=budget as usize {
            let order = order_scale * (3 * (d + 1) + 8);
            let shifted = match series_coeffs(&(a * pow_rat(q, s.k)), &(b * pow_rat(q, s.l)), &(c * pow_rat(q, s.m)), q, order) {
                Some(v) => v,
                None => return Ok(MatchOutcome::Degenerate),
            };
            let qn = pow_rat(q, s.n);
            let shifted: Vec<BigRational> = shifted.into_iter().enumerate().map(|(j, t)| t * pow_rat(&qn, j as i64)).collect();
            let up = series_coeffs(&(a * q), &(b * q), &(c * q), q, order).ok_or(Error::DivisionByZero)?;
            let base = series_coeffs(a, b, c, q, order).ok_or(Error::DivisionByZero)?;
            let w = d + 1;
            let mut rows = Vec::with_capacity(order);
            for j in 0..order {
                let mut row = vec![BigRational::zero(); 3 * w];
                for i in 0..w.min(j + 1) {
                    row[i] = shifted[j - i].clone();
                    row[w + i] = -up[j - i].clone();
                    row[2 * w + i] = -base[j - i].clone();
                }
                rows.push(row);
            }
            if modp::nullity(&rows, 3 * w) == Some(0) {
                continue;
            }
            let ns = nullspace(rows, 3 * w);
            match ns.len() {
                0 => continue,
                1 => {
                    found = Some((ns.into_iter().next().unwrap(), w));
                    break;
                }
                _ => return Ok(MatchOutcome::Degenerate),
            }
        }
        let Some((v, w)) = found else {
            if attempt == 0 {
                order_scale = 2;
                continue;
            }
            return Err(Error::BudgetExceeded { budget: budget as usize });
        };
        match candidate_agrees(rel, pt, &v, w)? {
            Some(true) => return Ok(MatchOutcome::Agrees),
            Some(false) => {}
            None => return Ok(MatchOutcome::Degenerate),
        }
        order_scale = 2;
    }
    Err(Error::VerificationFailed(format!("series matching disagrees with the composed relation for {}", rel.shift)))
}

fn eval_upoly(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, k| acc * x + k)
}

/// `None` when no admissible `x` was found to compare at.
fn candidate_agrees(rel: &ThreeTermRelation, pt: &[BigRational; 4], v: &[BigRational], w: usize) -> Result<Option<bool>> {
    use crate::exact_arith::ExactScalar;
    let (p0, p1, p2) = (&v[..w], &v[w..2 * w], &v[2 * w..]);
    let mut checked = 0;
    for k in 1..40i64 {
        let x = rat(k, 37 + k);
        let d = eval_upoly(p0, &x);
        if d.is_zero() {
            continue;
        }
        let mut vals: [Option<ExactScalar>; NVARS] = Default::default();
        for (i, val) in [A, B, C, Q].into_iter().zip(pt) {
            vals[i] = Some(ExactScalar::from_rational(val.clone()));
        }
        vals[X] = Some(ExactScalar::from_rational(x.clone()));
        let (Ok(qv), Ok(rv)) = (rel.q.eval(&vals), rel.r.eval(&vals)) else { continue };
        let qe = ExactScalar::from_rational(eval_upoly(p1, &x) / &d);
        let re = ExactScalar::from_rational(eval_upoly(p2, &x) / &d);
        if qv != qe || rv != re {
            return Ok(Some(false));
        }
        checked += 1;
        if checked == 4 {
            return Ok(Some(true));
        }
    }
    Ok((checked > 0).then_some(true))
}

/// Basis of the right nullspace of a dense rational matrix.
///
/// Rows are scaled to integers and reduced by fraction-free (Bareiss)
/// elimination; only the final back substitution uses rationals.
pub(crate) fn nullspace(rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| num::integer::lcm(acc, x.denom().clone()));
            row.into_iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let pr = &head[r];
        for row in tail.iter_mut() {
            let f = row[col].clone();
            for j in col..ncols {
                let v = &pr[col] * &row[j] - &f * &pr[j];
                row[j] = v / &prev;
            }
        }
        prev = m[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); ncols];
        v[f] = BigRational::one();
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = BigRational::zero();
            for j in pc + 1..ncols {
                if !v[j].is_zero() && !m[i][j].is_zero() {
                    acc += BigRational::from_integer(m[i][j].clone()) * &v[j];
                }
            }
            v[pc] = -acc / BigRational::from_integer(m[i][pc].clone());
        }
        let lcm = v.iter().fold(BigInt::one(), |acc, x| num::integer::lcm(acc, x.denom().clone()));
        let v: Vec<BigRational> = v.into_iter().map(|x| x * BigRational::from_integer(lcm.clone())).collect();
        basis.push(if v.iter().rev().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            v.into_iter().map(|x| -x).collect()
        } else {
            v
        });
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_small_matrix() {
        let rows = vec![vec![rat(1, 1), rat(2, 1), rat(3, 1)], vec![rat(2, 1), rat(4, 1), rat(6, 1)]];
        let ns = nullspace(rows.clone(), 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &rows {
                let dot: BigRational = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn single_steps_match_known_relations() {
        let (q, r) = compose_relation(ShiftVector::new(1, 0, 0, 0)).unwrap();
        assert_eq!(q, RationalFunction::parse("a*x*(1-b)", "1-c").unwrap());
        assert_eq!(r, RationalFunction::one());
        let (q, r) = compose_relation(ShiftVector::new(1, 1, 1, 0)).unwrap();
        assert_eq!((q, r), (RationalFunction::one(), RationalFunction::zero()));
    }

    #[test]
    fn derived_matches_table() {
        for s in crate::relations::TABLE_SHIFTS {
            let d = qr_derive_with(s, &DeriveOptions::default()).unwrap();
            let l = crate::relations::qr_lookup(s).unwrap();
            assert_eq!(d.q, l.q, "{s}");
            assert_eq!(d.r, l.r, "{s}");
        }
    }
}
