use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexPolygon, Vec2};
use crate::scalar::Real;

/// Affine function `x ↦ x·slope − intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Piece<T: Real> {
    pub slope: Vec2<T>,
    pub intercept: T,
}

impl<T: Real> Piece<T> {
    #[inline]
    pub fn eval(&self, x: Vec2<T>) -> T {
        x.dot(self.slope) - self.intercept
    }
}

/// Convex piecewise-affine function `ψ(x) = maxᵢ (x·yᵢ − cᵢ)`, defined on the
/// whole plane; `domain` records the region it was solved on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct PLConvexPotential<T: Real> {
    pub pieces: Vec<Piece<T>>,
    pub domain: ConvexPolygon<T>,
}

impl<T: Real> PLConvexPotential<T> {
    pub fn new(pieces: Vec<Piece<T>>, domain: ConvexPolygon<T>) -> Self {
        assert!(!pieces.is_empty(), "potential needs at least one piece");
        PLConvexPotential { pieces, domain }
    }

    /// Pieces with `cᵢ = (‖yᵢ‖² − wᵢ)/2`.
    pub fn from_weights(points: &[Vec2<T>], weights: &[T], domain: ConvexPolygon<T>) -> Self {
        assert_eq!(points.len(), weights.len());
        let half = T::lit(0.5);
        let pieces = points.iter().zip(weights).map(|(&y, &w)| Piece { slope: y, intercept: (y.norm_sq() - w) * half }).collect();
        PLConvexPotential::new(pieces, domain)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Index and value of the first maximizing piece.
    pub fn argmax(&self, x: Vec2<T>) -> (usize, T) {
        let mut best = (0, self.pieces[0].eval(x));
        for (i, p) in self.pieces.iter().enumerate().skip(1) {
            let v = p.eval(x);
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    pub fn value(&self, x: Vec2<T>) -> T {
        self.argmax(x).1
    }

    /// Slope of the first maximizing piece.
    pub fn slope(&self, x: Vec2<T>) -> Vec2<T> {
        self.pieces[self.argmax(x).0].slope
    }

    /// Indices of all pieces within `tol` of the maximum.
    pub fn active(&self, x: Vec2<T>, tol: T) -> Vec<usize> {
        let m = self.value(x);
        (0..self.pieces.len()).filter(|&i| self.pieces[i].eval(x) >= m - tol).collect()
    }

    /// All achieving slopes at `x`; a single slope away from cell boundaries.
    pub fn gradient(&self, x: Vec2<T>) -> Vec<Vec2<T>> {
        let scale = x.norm() * self.max_slope() + self.value(x).abs() + T::one();
        let tol = T::epsilon() * T::lit(64.0) * scale;
        let mut out: Vec<Vec2<T>> = self.active(x, tol).into_iter().map(|i| self.pieces[i].slope).collect();
        out.dedup();
        out
    }

    fn max_slope(&self) -> T {
        self.pieces.iter().map(|p| p.slope.norm()).fold(T::zero(), T::max)
    }
}
