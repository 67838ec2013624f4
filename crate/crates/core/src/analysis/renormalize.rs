use serde::{Deserialize, Serialize};

use super::curve::EccentricityCurve;
use super::field::IndexedPotential;
use crate::error::{Error, Result};
use crate::geometry::normalizing_map;
use crate::potential::Piece;
use crate::{Affine2d, Ellipse2d, Mat2d, Polygon, Potential, Vec2d};

/// Potentials rescaled around a base point so that the section ellipse at
/// height `h` becomes a disk of unit height.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizedPair {
    /// `u(ξ) = (ψ(x₀ + √h L⁻¹ξ) − ψ(x₀) − p₀·√h L⁻¹ξ) / h`.
    pub u: Potential,
    /// Legendre transform of `u`, when the dual potential was supplied.
    pub v: Option<Potential>,
    pub omega1: Polygon,
    pub omega2: Polygon,
    /// Largest δ with `x_t + δE_t ⊂ Ω₁ ∩ S_t` and `S_t ⊂ δ⁻¹E_t` over the curve heights `t ≤ h`.
    pub delta_bar: f64,
    /// The unimodular normalizing matrix `L` of the section ellipse.
    pub normalizing: Mat2d,
    /// `x ↦ ξ = L(x − x₀)/√h`.
    pub map: Affine2d,
    /// `y ↦ ζ = L⁻ᵀ(y − p₀)/√h`.
    pub dual_map: Affine2d,
    pub base: Vec2d,
    pub slope: Vec2d,
    pub height: f64,
    /// Distance from the origin to `∂Ω₂`: the discrete gradient at `x₀` is an
    /// interior target point, so the boundary contact holds only up to this gap.
    pub dual_boundary_gap: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn renormalize(
    psi: &IndexedPotential,
    dual: Option<&Potential>,
    target: &Polygon,
    x0: Vec2d,
    h: f64,
    e_h: &Ellipse2d,
    boundary: bool,
    curve: Option<&EccentricityCurve>,
) -> Result<NormalizedPair> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("height must be positive".into()));
    }
    let u1 = psi.domain();
    if boundary {
        u1.locate_boundary(x0)?;
    }
    let l = normalizing_map(e_h).linear;
    let s = h.sqrt();
    let linv_t = l.inverse().ok_or(Error::Singular)?.transpose();
    let (i0, psi0) = psi.argmax(x0);
    let p0 = psi.potential.pieces[i0].slope;

    let map = Affine2d::new(l.scale(1.0 / s), -(l * x0) / s)?;
    let dual_map = Affine2d::new(linv_t.scale(1.0 / s), -(linv_t * p0) / s)?;
    let pieces: Vec<Piece<f64>> =
        psi.potential.pieces.iter().map(|pc| Piece { slope: dual_map.apply(pc.slope), intercept: (pc.intercept + psi0 - x0.dot(pc.slope)) / h }).collect();
    let omega1 = u1.transform(&map);
    let omega2 = target.transform(&dual_map);
    let u = Potential::new(pieces, omega1.clone());
    let v = dual.map(|phi| {
        let pieces = phi
            .pieces
            .iter()
            .map(|pc| {
                let xk = pc.slope;
                Piece { slope: map.apply(xk), intercept: (pc.intercept - psi0 - p0.dot(xk - x0)) / h }
            })
            .collect();
        Potential::new(pieces, omega2.clone())
    });
    let dual_boundary_gap = if boundary { omega2.boundary_distance(Vec2d::zero()) } else { f64::NAN };
    let delta_bar = curve.map_or(f64::NAN, |c| delta_bar(c, u1, h));
    Ok(NormalizedPair { u, v, omega1, omega2, delta_bar, normalizing: l, map, dual_map, base: x0, slope: p0, height: h, dual_boundary_gap })
}

/// Comparability constant of sections and ellipses over the curve heights
/// up to `h`. Both inclusions are affine invariant, so they are measured in
/// the original coordinates.
pub fn delta_bar(curve: &EccentricityCurve, domain: &Polygon, h: f64) -> f64 {
    let mut best = f64::INFINITY;
    for s in curve.samples.iter().filter(|s| s.h <= h * (1.0 + 1e-12)) {
        let e = &s.ellipse;
        let outer = s.section.polygon.vertices().iter().map(|&v| e.gauge(v)).fold(0.0, f64::max);
        let d_out = 1.0 / outer;
        let d_in = match s.section.polygon.intersect(domain) {
            Some(inner) => {
                let m = normalizing_map(e);
                let rho = (e.semi_short * e.semi_long).sqrt();
                inner.transform(&m).inscribed_disk().1 / rho
            }
            None => 0.0,
        };
        best = best.min(d_out).min(d_in);
    }
    best
}
