use std::collections::BTreeSet;

use qforge::forge::{check_family, gauss_family, kummer_family, DEFAULT_SEED};
use qforge::relations::{ParamFamily, RationalFunction, ShiftVector};
use qforge::symmetry::{
    apply_generator, apply_generator_shift, canonical_representative, from_lambda, is_representative, orbit_enumerate, to_lambda, FullPoint, Generator,
    GeneratorWord, LambdaVector,
};
use Generator::*;

fn grid() -> Vec<ShiftVector> {
    let mut out = Vec::with_capacity(9usize.pow(4));
    for k in -4..=4 {
        for l in -4..=4 {
            for m in -4..=4 {
                for n in -4..=4 {
                    out.push(ShiftVector::new(k, l, m, n));
                }
            }
        }
    }
    out
}

fn word(letters: &[Generator]) -> GeneratorWord {
    GeneratorWord(letters.to_vec())
}

#[test]
fn involutions_on_grid() {
    for s in grid() {
        assert_eq!(word(&[S0, S0]).apply_shift(s), s);
        assert_eq!(word(&[S3, S3]).apply_shift(s), s);
    }
}

#[test]
fn generator_identities_on_grid() {
    let s1 = word(&[S3, S4, S5, S4, S3, S6]);
    let s2 = word(&[S3, S5, S6]);
    for s in grid() {
        assert_eq!(s1.apply_shift(s), apply_generator_shift(S1, s), "{s}");
        assert_eq!(s2.apply_shift(s), apply_generator_shift(S2, s), "{s}");
    }
}

#[test]
fn conjugation_table_on_grid() {
    for s in grid() {
        let lam = to_lambda(s);
        let [l1, l2, l3, l4] = lam.0;
        let conj = |w: GeneratorWord| to_lambda(w.apply_shift(from_lambda(lam)));
        assert_eq!(conj(word(&[S0])), LambdaVector([-l1, -l2, -l3, -l4]));
        assert_eq!(conj(word(&[S3])), LambdaVector([l2, l1, l3, l4]));
        assert_eq!(conj(word(&[S4])), LambdaVector([l3, l2, l1, l4]));
        assert_eq!(conj(word(&[S5])), LambdaVector([lam.bar(2), lam.bar(1), l3, l4]));
        assert_eq!(conj(word(&[S0, S6])), LambdaVector([lam.bar(1), lam.bar(2), lam.bar(3), l4]));
    }
}

#[test]
fn representative_is_orbit_constant() {
    let mut seen = BTreeSet::new();
    for s in grid() {
        if !seen.insert(s) {
            continue;
        }
        let (rep, w) = canonical_representative(s).unwrap();
        assert!(is_representative(rep));
        assert_eq!(w.apply_shift(s), rep);
        for t in orbit_enumerate(s) {
            seen.insert(t);
            assert_eq!(canonical_representative(t).unwrap().0, rep, "{s} ~ {t}");
        }
    }
    assert_eq!(canonical_representative(ShiftVector::new(0, 0, 0, 2)).unwrap().0, ShiftVector::new(0, 2, 2, 0));
}

/// Orbits met by the grid with other than exactly one member in the
/// representative set are reported; only ties with several members are
/// tolerated, and every orbit has at least one.
#[test]
fn exactly_one_representative_report() {
    let mut orbits = BTreeSet::new();
    for s in grid() {
        orbits.insert(*orbit_enumerate(s).iter().next().unwrap());
    }
    let mut ties = Vec::new();
    for first in &orbits {
        let reps: Vec<ShiftVector> = orbit_enumerate(*first).into_iter().filter(|t| is_representative(*t)).collect();
        assert!(!reps.is_empty(), "orbit of {first} has no representative");
        if reps.len() > 1 {
            ties.push(reps);
        }
    }
    println!("{} orbits, {} with several representatives", orbits.len(), ties.len());
    for t in ties.iter().take(5) {
        println!("  tie: {t:?}");
    }
}

/// Image points on which the basis `φ(a,b;c;x)`, `φ(aq,bq;cq;x)` is
/// rationally dependent, so `Q` is not determined: `x = 1`, or `c/a`,
/// `c/b` a small power of `q`.
fn degenerate(params: &[RationalFunction; 4]) -> bool {
    let [a, b, c, x] = params;
    if *x == RationalFunction::one() {
        return true;
    }
    let q = RationalFunction::var(3);
    (-4..=4).any(|j| {
        let qj = q.pow(j).unwrap();
        *c == a.mul(&qj) || *c == b.mul(&qj)
    })
}

fn transport(fam: &ParamFamily, shift: ShiftVector, g: Generator) -> Option<(ShiftVector, ParamFamily)> {
    let p = FullPoint::new(shift, [fam.a.clone(), fam.b.clone(), fam.c.clone(), fam.x.clone()]);
    let img = apply_generator(g, &p).ok()?;
    if degenerate(&img.params) {
        return None;
    }
    let [a, b, c, x] = img.params;
    let free: Vec<&str> = fam.free_symbols.iter().map(String::as_str).collect();
    let fam = ParamFamily::new(&free, [a, b, c, x], fam.root_order).ok()?;
    Some((img.shift, fam))
}

#[test]
fn families_transport_along_generators() {
    let cases = [
        (ShiftVector::new(0, 1, 1, 0), gauss_family()),
        (ShiftVector::new(0, 2, 2, 0), gauss_family()),
        (ShiftVector::new(1, 2, 1, -1), kummer_family()),
        (ShiftVector::new(0, 2, 2, 0), kummer_family()),
    ];
    let mut transported = 0;
    for (shift, fam) in cases {
        for g in Generator::ALL {
            let Some((s2, f2)) = transport(&fam, shift, g) else { continue };
            transported += 1;
            assert!(check_family(s2, &f2, 3, 8, DEFAULT_SEED).unwrap(), "{g} applied to {fam} at {shift}: {f2} at {s2}");
        }
    }
    // Gauss images under s1, s2, s4, s6 land on the degenerate locus.
    assert_eq!(transported, 20);
}
