use serde::{Deserialize, Serialize};

use crate::analysis::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::{Ellipse, Mat2};
use crate::{Affine2d, Ellipse2d, Mat2d, Polygon, Vec2d};

/// `U₂ = A·U₁` with `A` symmetric positive definite and `det A = 1`; the
/// Brenier potential is `½x·Ax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPair {
    pub a: Mat2d,
    pub u1: Polygon,
}

impl AnalyticPair {
    pub fn new(a: Mat2d, u1: Polygon) -> Result<Self> {
        let e = a.sym_eigen();
        if (a.b - a.c).abs() > 1e-14 * a.frobenius() || !(e.min > 0.0) {
            return Err(Error::InvalidInput("A must be symmetric positive definite".into()));
        }
        if (a.det() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular(a.det()));
        }
        Ok(AnalyticPair { a, u1 })
    }

    /// `diag(a, 1/a)`.
    pub fn diagonal(a: f64, u1: Polygon) -> Result<Self> {
        AnalyticPair::new(Mat2::diag(a, 1.0 / a), u1)
    }

    pub fn u2(&self) -> Polygon {
        self.u1.transform(&Affine2d::linear(self.a).expect("A is invertible"))
    }

    pub fn psi(&self, x: Vec2d) -> f64 {
        0.5 * x.dot(self.a * x)
    }

    pub fn map(&self, x: Vec2d) -> Vec2d {
        self.a * x
    }

    /// `v(y) = ½y·A⁻¹y`.
    pub fn dual(&self, y: Vec2d) -> f64 {
        0.5 * y.dot(self.a.inverse().expect("A is invertible") * y)
    }

    /// `√(λ_max/λ_min)`, the axis ratio of every level set of ψ.
    pub fn eta(&self) -> f64 {
        let e = self.a.sym_eigen();
        (e.max / e.min).sqrt()
    }

    /// `{x : ½x·Ax < h}`.
    pub fn section_at_zero(&self, h: f64) -> Ellipse2d {
        Ellipse::from_shape(Vec2d::zero(), self.a.inverse().unwrap().scale(2.0 * h)).expect("SPD shape")
    }

    /// `{y : ½y·A⁻¹y < h}`.
    pub fn dual_section_at_zero(&self, h: f64) -> Ellipse2d {
        Ellipse::from_shape(Vec2d::zero(), self.a.scale(2.0 * h)).expect("SPD shape")
    }

    /// Convex extension `sup_{z∈U₁} ψ(z) + ∇ψ(z)·(x − z)` of ψ to the plane.
    pub fn extended_psi(&self, x: Vec2d) -> f64 {
        // the supremum is attained at the A-projection of x onto U₁; a dense
        // tangent-plane search over the polygon keeps this oracle independent
        let mut best = f64::NEG_INFINITY;
        let (lo, hi) = self.u1.bounds();
        let k = 200;
        for j in 0..=k {
            for i in 0..=k {
                let z = lo + Vec2d::new((hi.x - lo.x) * i as f64 / k as f64, (hi.y - lo.y) * j as f64 / k as f64);
                if self.u1.contains(z) {
                    best = best.max(self.psi(z) + (self.a * z).dot(x - z));
                }
            }
        }
        best
    }
}

impl ScalarField for AnalyticPair {
    fn value(&self, x: Vec2d) -> f64 {
        self.psi(x)
    }
}

/// `q(x) = ½x·Hx + g·x + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticField {
    pub hessian: Mat2d,
    pub gradient: Vec2d,
    pub constant: f64,
}

impl ScalarField for QuadraticField {
    fn value(&self, x: Vec2d) -> f64 {
        0.5 * x.dot(self.hessian * x) + self.gradient.dot(x) + self.constant
    }
}
