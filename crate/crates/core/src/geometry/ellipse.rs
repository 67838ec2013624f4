use serde::{Deserialize, Serialize};

use super::affine::AffineMap;
use super::polygon::ConvexPolygon;
use super::vec::{Mat2, Vec2};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `center + {s·e_short + l·e_long : (s/λ)² + (l/Λ)² ≤ 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Ellipse<T: Real> {
    pub center: Vec2<T>,
    pub semi_short: T,
    pub semi_long: T,
    pub e_long: Vec2<T>,
}

impl<T: Real> Ellipse<T> {
    pub fn new(center: Vec2<T>, semi_short: T, semi_long: T, e_long: Vec2<T>) -> Result<Self> {
        if !(semi_short > T::zero()) || !semi_long.is_finite() {
            return Err(Error::InvalidInput("ellipse axes must be positive and finite".into()));
        }
        let e = e_long.normalized().ok_or(Error::ZeroVector)?;
        let (s, l, e) = if semi_short <= semi_long { (semi_short, semi_long, e) } else { (semi_long, semi_short, e.perp()) };
        Ok(Ellipse { center, semi_short: s, semi_long: l, e_long: canonical_axis(e) })
    }

    pub fn circle(center: Vec2<T>, r: T) -> Result<Self> {
        Ellipse::new(center, r, r, Vec2::new(T::one(), T::zero()))
    }

    /// Builds `{x : (x−c)ᵀ Q⁻¹ (x−c) ≤ 1}` from a symmetric positive definite `Q`.
    pub fn from_shape(center: Vec2<T>, q: Mat2<T>) -> Result<Self> {
        let e = q.sym_eigen();
        if !(e.min > T::zero()) {
            return Err(Error::InvalidInput("shape matrix is not positive definite".into()));
        }
        Ellipse::new(center, e.min.sqrt(), e.max.sqrt(), e.v_max)
    }

    /// `e_long` rotated counter-clockwise.
    pub fn e_short(&self) -> Vec2<T> {
        self.e_long.perp()
    }

    pub fn area(&self) -> T {
        T::PI() * self.semi_short * self.semi_long
    }

    /// `Λ/λ`.
    pub fn eccentricity(&self) -> T {
        self.semi_long / self.semi_short
    }

    /// Same centre and axis lengths with the axes exchanged.
    pub fn perp(&self) -> Self {
        if self.semi_short == self.semi_long {
            return *self;
        }
        Ellipse { e_long: canonical_axis(self.e_short()), ..*self }
    }

    /// Shape matrix `Q = Λ² e_l e_lᵀ + λ² e_s e_sᵀ`.
    pub fn shape(&self) -> Mat2<T> {
        let l = self.semi_long * self.semi_long;
        let s = self.semi_short * self.semi_short;
        Mat2::outer(self.e_long, self.e_long).scale(l) + Mat2::outer(self.e_short(), self.e_short()).scale(s)
    }

    /// Minkowski gauge about the centre; `≤ 1` inside.
    pub fn gauge(&self, x: Vec2<T>) -> T {
        let d = x - self.center;
        (d.dot(self.e_long) / self.semi_long).hypot(d.dot(self.e_short()) / self.semi_short)
    }

    pub fn contains(&self, x: Vec2<T>) -> bool {
        self.gauge(x) <= T::one()
    }

    /// Dilation about the centre.
    pub fn scaled(&self, s: T) -> Self {
        Ellipse { semi_short: self.semi_short * s, semi_long: self.semi_long * s, ..*self }
    }

    pub fn transform(&self, m: &AffineMap<T>) -> Self {
        let q = m.linear * self.shape() * m.linear.transpose();
        Ellipse::from_shape(m.apply(self.center), q.symmetrized()).expect("image of an ellipse under an invertible map")
    }

    /// `k` points on the boundary, CCW.
    pub fn boundary_points(&self, k: usize) -> Vec<Vec2<T>> {
        (0..k)
            .map(|i| {
                let t = T::TAU() * T::from_usize(i).unwrap() / T::from_usize(k).unwrap();
                self.center + self.e_long * (self.semi_long * t.cos()) + self.e_short() * (self.semi_short * t.sin())
            })
            .collect()
    }
}

// Axis directions are defined up to sign; pick the one in the right half-plane.
fn canonical_axis<T: Real>(e: Vec2<T>) -> Vec2<T> {
    let e = if e.x > T::zero() || (e.x == T::zero() && e.y > T::zero()) { e } else { -e };
    // no negative zeros
    Vec2::new(e.x + T::zero(), e.y + T::zero())
}

/// Ellipse centred at the centroid of `p`, with the principal axes of its
/// covariance tensor, axis ratio `√(μ_max/μ_min)` and area `target_area`.
pub fn fit_ellipse<T: Real>(p: &ConvexPolygon<T>, target_area: T) -> Result<Ellipse<T>> {
    if !(target_area > T::zero()) {
        return Err(Error::InvalidInput("target area must be positive".into()));
    }
    let m = p.moments();
    let det = m.covariance.det();
    if !(det > T::zero()) {
        return Err(Error::DegeneratePolygon("singular covariance".into()));
    }
    // Q = k·C with π·√det(Q) = target area
    let k = target_area / (T::PI() * det.sqrt());
    Ellipse::from_shape(m.centroid, m.covariance.scale(k))
}

/// Unimodular map taking `e` onto the centred disk of equal area.
pub fn normalizing_map<T: Real>(e: &Ellipse<T>) -> AffineMap<T> {
    let rho = (e.semi_short * e.semi_long).sqrt();
    let el = e.e_long;
    let es = e.e_short();
    let lin = Mat2::outer(el, el).scale(rho / e.semi_long) + Mat2::outer(es, es).scale(rho / e.semi_short);
    AffineMap { linear: lin, translation: -(lin * e.center), unimodular: true }
}
