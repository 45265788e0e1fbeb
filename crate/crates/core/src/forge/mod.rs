//! Identity verification and the telescoping pipeline built on the
//! three-term relations.

mod conjecture;
mod families;
mod registry;
mod telescope;

pub use conjecture::{conjecture_check, restricted_q, sv5_cauchy_check, sv5_cleared_check, ConjectureReport, ConjectureStep, Pattern};
pub use families::{
    binomial_family, check_family, check_family_with, gauss_family, kummer_family, product_r, product_r_value, product_r_with, root_of_unity_family,
    solution_families, FamilyPoint,
};
pub use registry::{identity, sample_bindings, verify_identity, verify_identity_in, Constraint, IdentityCheck, IdentityRecord, LhsPattern, Mode, Registry};
pub use telescope::{family_point, phi_value, telescoped_check, telescoped_check_with, telescoped_step, PhiValue, PipelineRun, PipelineStep};

use num::BigRational;
use rand::Rng;

/// Fixed seed for sampled checks.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Nonzero rational with numerator and denominator bounded by `height`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, height: i64) -> BigRational {
    let num = loop {
        let n = rng.gen_range(-height..=height);
        if n != 0 {
            break n;
        }
    };
    let den = rng.gen_range(1..=height);
    BigRational::new(num.into(), den.into())
}
