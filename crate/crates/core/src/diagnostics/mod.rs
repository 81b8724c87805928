//! Norms, energy budgets, the closed-form bound functions, difference norms
//! between paired runs, and an empirical probe of an anisotropic
//! Ladyzhenskaya-type inequality.
//!
//! Conventions used throughout:
//!
//! - `‖f‖²_{H¹} = ‖f‖₂² + ‖∇f‖₂²` and `‖f‖²_{H²} = ‖f‖²_{H¹} + ‖Δf‖₂²`.
//! - Norms of `v` are vector norms: `‖v‖₂² = ‖v₁‖₂² + ‖v₂‖₂²`.
//! - Time integrals are accumulated step by step from the sampled states.

mod bounds;
mod difference;
mod norms;
mod probe;
mod record;

pub use bounds::{alpha, alphas, beta, BoundConfig, BoundRow};
pub use difference::{difference_norms, DifferenceSample, DifferenceSeries};
pub use norms::{h1_norm_sq, h2_norm_sq, l4_norm, norms, vector_l4_norm, NormSample};
pub use probe::ladyzhenskaya_ratio;
pub(crate) use record::csv_error;
pub use record::{
    energy_budget, write_budget_csv, Budget, BudgetPoint, Quadrature, Recorder, TrajectoryRecord,
    TrajectorySample, RECORD_HEADER,
};
