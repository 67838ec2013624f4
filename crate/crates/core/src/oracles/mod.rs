//! Independent ground truth: exact assignment, closed-form affine pairs and
//! discrete Monge–Ampère residuals.

mod analytic;
mod assignment;
mod residual;

pub use analytic::{AnalyticPair, QuadraticField};
pub use assignment::{exact_assignment, Assignment, MAX_ASSIGNMENT};
pub use residual::ma_residual;
