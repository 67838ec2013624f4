//! Measurements on solved potentials: sections, eccentricity, renormalization,
//! engulfing, Hessian growth, obliqueness and corner growth.

mod corner;
mod curve;
mod engulfing;
mod field;
mod hessian;
mod oblique;
mod renormalize;
mod section;

pub use corner::{corner_growth, CornerGrowth, CornerOptions};
pub use curve::{height_grid, CurveOptions, CurveSample, EccentricityCurve};
pub use engulfing::Engulfing;
pub use field::{IndexedPotential, ScalarField};
pub use hessian::{hessian_estimate, hessian_field, w2p_from_field, w2p_norm, HessianEstimate, W2pEstimate, W2pOptions};
pub use oblique::{obliqueness_check, ObliquenessOptions, ObliquenessSample};
pub use renormalize::{delta_bar, renormalize, NormalizedPair};
pub use section::{CentringOptions, Section};
