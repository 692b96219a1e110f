//! Feature importance estimators, built from the same stages as the effects.

pub mod performance;
pub mod score;
pub mod sfimp;
pub mod variance;

pub use performance::{ici_curve, ici_curves, pfi_exhaustive, pfi_permutation, pi_curve, DEFAULT_REPEATS};
pub use score::{ImportanceMethod, ImportanceScore};
pub use sfimp::{pfi_payout, sfimp, sfimp_all, PerturbMode, SfimpResult};
pub use variance::{ces_curve, firm, pd_importance};
