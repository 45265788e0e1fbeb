//! Solution families of `Q^(N) = 0` and the products of `R^(N)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact_arith::ExactScalar;
use crate::relations::{relation_for, shift_params, ParamFamily, RationalFunction, ShiftVector, ThreeTermRelation, NVARS};

use super::random_rational;

fn family(free: &[&str], slots: [&str; 4], root_order: Option<u32>) -> ParamFamily {
    ParamFamily::parse(free, slots, root_order).expect("built-in family is valid")
}

/// `(a, -a, -q, x)`.
pub fn binomial_family() -> ParamFamily {
    family(&["a", "x"], ["a", "-a", "-q", "x"], None)
}

/// `(a, b, c, c/(ab))`.
pub fn gauss_family() -> ParamFamily {
    family(&["a", "b", "c"], ["a", "b", "c", "c/(a*b)"], None)
}

/// `(a, b, bq/a, -q/a)`.
pub fn kummer_family() -> ParamFamily {
    family(&["a", "b"], ["a", "b", "b*q/a", "-q/a"], None)
}

/// `(ζ_l q, b, ζ_l b, 1)` with `w = ζ_l`.
pub fn root_of_unity_family(l: u32) -> ParamFamily {
    family(&["b"], ["w*q", "b", "w*b", "1"], Some(l))
}

/// Registered and pattern-derived families for `shift`.
///
/// Patterns: `(l,l,0,n)` with `n` even and positive; `k+l-m+n = 0`;
/// `(k,l,l-k,-k)` with `l` even and positive; `(0,l,l,0)` with `l >= 3`.
pub fn solution_families(shift: ShiftVector) -> Vec<ParamFamily> {
    let ShiftVector { k, l, m, n } = shift;
    let mut out: Vec<ParamFamily> = Vec::new();
    let mut push = |f: ParamFamily| {
        if !out.contains(&f) {
            out.push(f);
        }
    };
    if k == l && m == 0 && n > 0 && n % 2 == 0 {
        push(binomial_family());
    }
    if shift.balance() == 0 {
        push(gauss_family());
    }
    if m == l - k && n == -k && l > 0 && l % 2 == 0 {
        push(kummer_family());
    }
    if k == 0 && n == 0 && l == m && l >= 3 {
        push(root_of_unity_family(l as u32));
    }
    out
}

/// Values of the free symbols of `fam`, in order, and `q`.
#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub free: Vec<ExactScalar>,
    pub q: ExactScalar,
}

impl FamilyPoint {
    /// `(a_N, b_N, c_N, x_N)` at this point, with `w` bound to `ζ_l`.
    pub fn params_at_step(&self, fam: &ParamFamily, shift: ShiftVector, step: u32) -> Result<[ExactScalar; 4]> {
        shift_params(fam, shift, step).eval(&self.free, &self.q)
    }

    /// Symbol vector for evaluating `Q` or `R` at step `step`.
    pub fn relation_point(&self, fam: &ParamFamily, shift: ShiftVector, step: u32) -> Result<[Option<ExactScalar>; NVARS]> {
        let [a, b, c, x] = self.params_at_step(fam, shift, step)?;
        let mut v: [Option<ExactScalar>; NVARS] = Default::default();
        v[0] = Some(a);
        v[1] = Some(b);
        v[2] = Some(c);
        v[3] = Some(self.q.clone());
        v[4] = Some(x);
        Ok(v)
    }
}

fn random_point(rng: &mut ChaCha8Rng, fam: &ParamFamily) -> FamilyPoint {
    let free = fam.free_symbols.iter().map(|_| ExactScalar::from_rational(random_rational(rng, 97))).collect();
    let q = loop {
        let q = random_rational(rng, 97);
        if q.numer().magnitude() != q.denom().magnitude() {
            break ExactScalar::from_rational(q);
        }
    };
    FamilyPoint { free, q }
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::ZeroDenominator(_) | Error::DivisionByZero)
}

/// `Q^(N) = 0` for `N = 1..=n_max`, tested exactly at `trials` random
/// rational points of the free symbols and `q`.
pub fn check_family(shift: ShiftVector, fam: &ParamFamily, n_max: u32, trials: usize, seed: u64) -> Result<bool> {
    let rel = relation_for(shift)?;
    check_family_with(&rel, fam, n_max, trials, seed)
}

pub fn check_family_with(rel: &ThreeTermRelation, fam: &ParamFamily, n_max: u32, trials: usize, seed: u64) -> Result<bool> {
    fam.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        if attempts >= 10 * trials.max(1) {
            return Err(Error::SamplingExhausted { attempts });
        }
        attempts += 1;
        let pt = random_point(&mut rng, fam);
        let mut values = Vec::with_capacity(n_max as usize);
        let mut ok = true;
        for step in 1..=n_max {
            match pt.relation_point(fam, rel.shift, step).and_then(|v| rel.q.eval(&v)) {
                Ok(v) => values.push(v),
                Err(e) if retryable(&e) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !ok {
            continue;
        }
        if values.iter().any(|v| !v.is_zero()) {
            return Ok(false);
        }
        done += 1;
    }
    Ok(true)
}

/// `R^(1) R^(2) ... R^(N)` as a rational function of the family's symbols.
pub fn product_r(shift: ShiftVector, fam: &ParamFamily, n: u32) -> Result<RationalFunction> {
    let rel = relation_for(shift)?;
    product_r_with(&rel, fam, n)
}

pub fn product_r_with(rel: &ThreeTermRelation, fam: &ParamFamily, n: u32) -> Result<RationalFunction> {
    let mut acc = RationalFunction::one();
    for step in 1..=n {
        let r = shift_params(fam, rel.shift, step).substitute_into(&rel.r).map_err(|e| match e {
            Error::ZeroDenominator(s) | Error::DegenerateFamily(s) => Error::DegenerateFamily(format!("R^({step}) has a vanishing denominator: {s}")),
            e => e,
        })?;
        acc = acc.mul(&r);
    }
    Ok(acc)
}

/// `R^(1) ... R^(N)` evaluated exactly at a point.
pub fn product_r_value(rel: &ThreeTermRelation, fam: &ParamFamily, pt: &FamilyPoint, n: u32) -> Result<ExactScalar> {
    let mut acc = ExactScalar::one();
    for step in 1..=n {
        let v = rel.r.eval(&pt.relation_point(fam, rel.shift, step)?)?;
        acc = acc.mul(&v);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::rat;
    use crate::relations::parse_rational_function;

    fn sv(k: i64, l: i64, m: i64, n: i64) -> ShiftVector {
        ShiftVector::new(k, l, m, n)
    }

    #[test]
    fn families_by_shift() {
        assert!(solution_families(sv(0, 1, 1, 0)).contains(&gauss_family()));
        assert!(solution_families(sv(0, 0, 0, 2)).contains(&binomial_family()));
        assert!(solution_families(sv(5, 7, 1, 2)).is_empty());
        assert_eq!(solution_families(sv(0, 3, 3, 0)), vec![gauss_family(), root_of_unity_family(3)]);
        assert!(solution_families(sv(0, 2, 2, 0)).contains(&kummer_family()));
        assert!(solution_families(sv(1, 2, 1, -1)).contains(&kummer_family()));
        assert!(solution_families(sv(0, 0, 0, 1)).is_empty());
    }

    #[test]
    fn registered_families_pass() {
        assert!(check_family(sv(0, 2, 2, 0), &kummer_family(), 4, 20, 1).unwrap());
        assert!(check_family(sv(0, 1, 1, 0), &gauss_family(), 4, 20, 1).unwrap());
    }

    #[test]
    fn generic_point_fails() {
        let generic = ParamFamily::parse(&["a", "b", "c", "x"], ["a", "b", "c", "x"], None).unwrap();
        assert!(!check_family(sv(0, 1, 1, 0), &generic, 1, 20, 1).unwrap());
    }

    #[test]
    fn empty_product_is_one() {
        assert_eq!(product_r(sv(0, 1, 1, 0), &gauss_family(), 0).unwrap(), RationalFunction::one());
    }

    #[test]
    fn gauss_product_matches_pochhammer_ratio() {
        let p = product_r(sv(0, 1, 1, 0), &gauss_family(), 3).unwrap();
        let expected = parse_rational_function("(1-c)*(1-c*q)*(1-c*q^2)/((1-c/a)*(1-c*q/a)*(1-c*q^2/a))").unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn binomial_product_value() {
        let rel = relation_for(sv(0, 0, 0, 2)).unwrap();
        let pt = FamilyPoint {
            free: vec![ExactScalar::from_rational(rat(1, 3)), ExactScalar::from_rational(rat(2, 5))],
            q: ExactScalar::from_rational(rat(1, 2)),
        };
        let v = product_r_value(&rel, &binomial_family(), &pt, 2).unwrap();
        // (x; q^2)_2 / (a^2 x; q^2)_2 at a = 1/3, x = 2/5, q = 1/2.
        let x = rat(2, 5);
        let a2x = rat(1, 9) * &x;
        let num = (rat(1, 1) - &x) * (rat(1, 1) - &x * rat(1, 4));
        let den = (rat(1, 1) - &a2x) * (rat(1, 1) - a2x * rat(1, 4));
        assert_eq!(v, ExactScalar::from_rational(num / den));
    }
}
