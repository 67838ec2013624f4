use serde::{Deserialize, Serialize};

use super::polygon::{BoundaryLocation, ConvexPolygon};
use super::vec::Vec2;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Angle `ω(v1, v2) ∈ [0, π]` between two nonzero vectors.
pub fn angle<T: Real>(v1: Vec2<T>, v2: Vec2<T>) -> Result<T> {
    let a = v1.normalized().ok_or(Error::ZeroVector)?;
    let b = v2.normalized().ok_or(Error::ZeroVector)?;
    // atan2 keeps full precision for nearly parallel vectors, unlike acos
    Ok(a.cross(b).abs().atan2(a.dot(b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Ray<T: Real> {
    pub origin: Vec2<T>,
    pub direction: Vec2<T>,
}

impl<T: Real> Ray<T> {
    pub fn new(origin: Vec2<T>, direction: Vec2<T>) -> Result<Self> {
        Ok(Ray { origin, direction: direction.normalized().ok_or(Error::ZeroVector)? })
    }

    pub fn at(&self, t: T) -> Vec2<T> {
        self.origin + self.direction * t
    }
}

/// Open cone `apex + {λv : λ > 0, ω(v, e) < θ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Cone<T: Real> {
    pub apex: Vec2<T>,
    pub direction: Vec2<T>,
    pub opening: T,
}

impl<T: Real> Cone<T> {
    pub fn new(apex: Vec2<T>, direction: Vec2<T>, opening: T) -> Result<Self> {
        if !(opening >= T::zero() && opening <= T::PI()) {
            return Err(Error::InvalidInput("cone opening must lie in [0, π]".into()));
        }
        Ok(Cone { apex, direction: direction.normalized().ok_or(Error::ZeroVector)?, opening })
    }

    pub fn contains(&self, x: Vec2<T>) -> bool {
        angle(x - self.apex, self.direction).is_ok_and(|w| w < self.opening)
    }
}

fn tangent_pair<T: Real>(p: &ConvexPolygon<T>, x0: Vec2<T>) -> Result<(Vec2<T>, Vec2<T>)> {
    let unit = |v: Vec2<T>| v.normalized().expect("canonical polygons have no zero-length edges");
    match p.locate_boundary(x0)? {
        BoundaryLocation::Vertex(i) => {
            let v = p.vertex(i);
            let left = unit(p.vertex(i + p.len() - 1) - v);
            let right = unit(p.vertex(i + 1) - v);
            Ok((left, right))
        }
        BoundaryLocation::Edge(i) => {
            let (a, b) = p.edge(i);
            let right = unit(b - a);
            Ok((-right, right))
        }
    }
}

/// Tangent ray at a boundary point pointing against the CCW traversal.
pub fn left_tangent<T: Real>(p: &ConvexPolygon<T>, x0: Vec2<T>) -> Result<Ray<T>> {
    let (l, _) = tangent_pair(p, x0)?;
    Ok(Ray { origin: x0, direction: l })
}

/// Tangent ray at a boundary point pointing along the CCW traversal.
pub fn right_tangent<T: Real>(p: &ConvexPolygon<T>, x0: Vec2<T>) -> Result<Ray<T>> {
    let (_, r) = tangent_pair(p, x0)?;
    Ok(Ray { origin: x0, direction: r })
}
