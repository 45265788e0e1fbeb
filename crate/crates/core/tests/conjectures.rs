use qforge::forge::{conjecture_check, Pattern, DEFAULT_SEED};
use qforge::relations::ShiftVector;

fn run(pattern: Pattern, shift: ShiftVector) {
    let report = conjecture_check(pattern, shift, 20, DEFAULT_SEED).unwrap();
    for s in &report.steps {
        println!("{} {}: {} ({})", shift, s.name, s.passed, s.detail);
    }
    assert!(report.passed(), "{report:#?}");
}

#[test]
fn even_binomial_instance() {
    run(Pattern::EvenBinomial, ShiftVector::new(2, 2, 0, 2));
}

#[test]
fn balanced_instance() {
    run(Pattern::Balanced, ShiftVector::new(1, 1, 2, 0));
}

#[test]
fn kummer_instance() {
    run(Pattern::Kummer, ShiftVector::new(2, 4, 2, -2));
}

#[test]
fn root_of_unity_instance() {
    run(Pattern::RootOfUnity, ShiftVector::new(0, 4, 4, 0));
}
