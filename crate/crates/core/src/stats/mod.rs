//! Mixed-model fitting, likelihood-ratio tests, tail probabilities and the
//! permutation cross-check.

pub mod lmm;
pub mod permutation;
pub mod special;

pub use lmm::{fit_lmm, fit_lmm_levels, lrt, LmmError, LmmFit, LongRow, LrtResult};
pub use permutation::{permutation_test, PermutationResult};
pub use special::{chi2_sf, format_p, normal_two_sided_p};
