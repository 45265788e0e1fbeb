mod common;

use common::{agreement_case, field_axioms_case, recurrence_case, run_cases, symmetry_case, CASES, FIELD_ORDERS};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use qforge::exact_arith::ExactScalar;
use qforge::relations::parse_rational_function;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES as u32, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn field_axioms(seed in any::<u64>(), order in prop::sample::select(FIELD_ORDERS.to_vec())) {
        let r = field_axioms_case(&mut ChaCha8Rng::seed_from_u64(seed), order);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn recurrences(seed in any::<u64>()) {
        let r = recurrence_case(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn phi_symmetric_in_a_b(seed in any::<u64>()) {
        let r = symmetry_case(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn exact_numeric_agreement(seed in any::<u64>()) {
        let r = agreement_case(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }
}

#[test]
fn skipped_draws_are_rare() {
    for (name, case) in [("recurrences", recurrence_case as fn(&mut ChaCha8Rng) -> Result<bool, String>), ("symmetry", symmetry_case), ("agreement", agreement_case)] {
        let skipped = run_cases(0x5eed, case).unwrap();
        println!("{name}: {CASES} cases, {skipped} skipped");
    }
}

/// Each order is exercised 1000 times on its own, not only in the mix.
#[test]
fn field_axioms_per_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for order in FIELD_ORDERS {
        for _ in 0..CASES {
            field_axioms_case(&mut rng, order).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..config() })]

    /// Equivalent forms parse to equal rational functions and agree at 40
    /// points.
    #[test]
    fn rational_function_forms_agree(k in 1u32..5, seed in any::<u64>()) {
        let expanded = parse_rational_function(&format!("(1 - a^{k})/(1 - a)")).unwrap();
        let sum = (0..k).map(|j| format!("a^{j}")).collect::<Vec<_>>().join(" + ");
        let geometric = parse_rational_function(&sum).unwrap();
        prop_assert_eq!(&expanded, &geometric);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..40 {
            let a = ExactScalar::from_rational(common::rational(&mut rng, 50));
            let mut v: [Option<ExactScalar>; 6] = Default::default();
            v[0] = Some(a.clone());
            if a.is_one() {
                continue;
            }
            prop_assert_eq!(expanded.eval(&v).unwrap(), geometric.eval(&v).unwrap());
        }
    }
}
