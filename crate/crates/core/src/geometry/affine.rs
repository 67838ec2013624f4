use serde::{Deserialize, Serialize};

use super::vec::{Mat2, Vec2};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Invertible affine map `x ↦ linear·x + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct AffineMap<T: Real> {
    pub linear: Mat2<T>,
    pub translation: Vec2<T>,
    pub unimodular: bool,
}

impl<T: Real> AffineMap<T> {
    pub fn new(linear: Mat2<T>, translation: Vec2<T>) -> Result<Self> {
        linear.inverse().ok_or(Error::Singular)?;
        Ok(AffineMap { linear, translation, unimodular: false })
    }

    /// Checks `|det − 1| ≤ 10⁻¹²` (f64).
    pub fn unimodular(linear: Mat2<T>, translation: Vec2<T>) -> Result<Self> {
        let det = linear.det();
        if !((det - T::one()).abs() <= T::lit(T::UNIMODULAR_TOL)) {
            return Err(Error::NotUnimodular(det.f64()));
        }
        Ok(AffineMap { linear, translation, unimodular: true })
    }

    pub fn identity() -> Self {
        AffineMap { linear: Mat2::identity(), translation: Vec2::zero(), unimodular: true }
    }

    pub fn translation(t: Vec2<T>) -> Self {
        AffineMap { linear: Mat2::identity(), translation: t, unimodular: true }
    }

    pub fn linear(linear: Mat2<T>) -> Result<Self> {
        let m = AffineMap::new(linear, Vec2::zero())?;
        Ok(AffineMap::unimodular(linear, Vec2::zero()).unwrap_or(m))
    }

    #[inline]
    pub fn apply(&self, p: Vec2<T>) -> Vec2<T> {
        self.linear * p + self.translation
    }

    #[inline]
    pub fn apply_vector(&self, v: Vec2<T>) -> Vec2<T> {
        self.linear * v
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap<T>) -> Self {
        AffineMap {
            linear: self.linear * other.linear,
            translation: self.linear * other.translation + self.translation,
            unimodular: self.unimodular && other.unimodular,
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.linear.inverse().expect("affine map is invertible");
        AffineMap { linear: inv, translation: -(inv * self.translation), unimodular: self.unimodular }
    }

    pub fn det(&self) -> T {
        self.linear.det()
    }

    /// Operator norm of the linear part.
    pub fn norm(&self) -> T {
        self.linear.norm()
    }
}
