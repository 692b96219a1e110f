//! Feature effect estimators.

pub mod ale;
pub mod curve;
pub mod grid;
pub mod lime;
pub mod marginal;
pub mod pd;
pub mod shapley;

pub use ale::{ale_first_order, quantile_binning, Binning};
pub use curve::{CurveMethod, CurvePoint, EffectCurve};
pub use grid::{Grid, GridSource};
pub use lime::{lime_explain, LimeConfig, LimeExplanation};
pub use marginal::{average_marginal_effect, marginal_effect, resolve_step, AverageMarginalEffect};
pub use pd::{ice_curves, pd_curve};
pub use shapley::{
    coalition_weights, pd_payout, shapley_exact, shapley_mc, Attribution, ShapleyExplanation, ShapleyMode,
    DEFAULT_EXACT_CAP,
};
