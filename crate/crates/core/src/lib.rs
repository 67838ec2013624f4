//! Semi-discrete optimal transport between convex polygons and the
//! geometric measurements (sections, eccentricity, obliqueness, Hessian
//! growth) used to study boundary regularity of Brenier potentials.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod oracles;
pub mod potential;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec2d = geometry::Vec2<f64>;
pub type Mat2d = geometry::Mat2<f64>;
pub type Polygon = geometry::ConvexPolygon<f64>;
pub type Ellipse2d = geometry::Ellipse<f64>;
pub type Affine2d = geometry::AffineMap<f64>;

pub type Vec2f = geometry::Vec2<f32>;
pub type Polygonf = geometry::ConvexPolygon<f32>;
pub type Potential = potential::PLConvexPotential<f64>;
