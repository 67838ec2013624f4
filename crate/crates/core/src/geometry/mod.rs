//! Planar primitives: polygons, ellipses, affine maps, rays and cones.

mod affine;
mod ellipse;
mod polygon;
mod ray;
mod vec;

pub use affine::AffineMap;
pub use ellipse::{fit_ellipse, normalizing_map, Ellipse};
pub(crate) use polygon::clip_into;
pub use polygon::{BoundaryLocation, ConvexPolygon, Moments};
pub use ray::{angle, left_tangent, right_tangent, Cone, Ray};
pub use vec::{Mat2, SymEigen, Vec2};
