//! q-hypergeometric identity forging: exact and high-precision evaluation of
//! basic hypergeometric series, three-term contiguous relations, their
//! symmetry group, and a telescoping verifier for identity families.

pub mod error;
pub mod exact_arith;
pub mod qseries;

pub use error::{Error, Result};
pub mod relations;
pub mod symmetry;
pub mod forge;
