use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::{Mat2d, Polygon, Vec2d};

const HALF: i32 = 3;
const STENCIL: usize = 49;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianEstimate {
    pub hessian: Mat2d,
    /// RMS misfit of the quadratic over the stencil.
    pub residual: f64,
    pub radius: f64,
}

impl HessianEstimate {
    /// Largest absolute eigenvalue.
    pub fn norm(&self) -> f64 {
        let e = self.hessian.sym_eigen();
        e.max.abs().max(e.min.abs())
    }
}

fn basis(i: i32, j: i32) -> [f64; 6] {
    let (x, y) = (f64::from(i), f64::from(j));
    [1.0, x, y, 0.5 * x * x, x * y, 0.5 * y * y]
}

/// Least-squares projector `(ΦᵀΦ)⁻¹Φᵀ` of the 7×7 stencil in unit spacing.
fn projector() -> &'static [[f64; STENCIL]; 6] {
    static P: OnceLock<[[f64; STENCIL]; 6]> = OnceLock::new();
    P.get_or_init(|| {
        let rows: Vec<[f64; 6]> = (-HALF..=HALF).flat_map(|j| (-HALF..=HALF).map(move |i| basis(i, j))).collect();
        let mut a = [[0.0; 12]; 6];
        for r in &rows {
            for p in 0..6 {
                for q in 0..6 {
                    a[p][q] += r[p] * r[q];
                }
            }
        }
        for (p, row) in a.iter_mut().enumerate() {
            row[6 + p] = 1.0;
        }
        // Gauss–Jordan with partial pivoting
        for col in 0..6 {
            let piv = (col..6).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for r in 0..6 {
                if r != col {
                    let f = a[r][col];
                    if f != 0.0 {
                        let pivot = a[col];
                        for (x, p) in a[r].iter_mut().zip(pivot) {
                            *x -= f * p;
                        }
                    }
                }
            }
        }
        let mut out = [[0.0; STENCIL]; 6];
        for (k, r) in rows.iter().enumerate() {
            for p in 0..6 {
                out[p][k] = (0..6).map(|q| a[p][6 + q] * r[q]).sum();
            }
        }
        out
    })
}

/// Hessian of the least-squares quadratic through `f` on a 7×7 stencil of
/// spacing `r/(3√2)` centred at `x`, so the stencil fills the disk `B_r(x)`.
pub fn hessian_estimate<F: ScalarField + ?Sized>(f: &F, domain: Option<&Polygon>, x: Vec2d, r: f64) -> Result<HessianEstimate> {
    let floor = 3.0 * f.resolution(x);
    if !(r >= floor) || !(r > 0.0) {
        return Err(Error::BelowResolution { radius: r, floor });
    }
    if let Some(d) = domain {
        if d.depth(x) < r * (1.0 - 1e-12) {
            return Err(Error::DiskNotContained);
        }
    }
    let s = r / (3.0 * std::f64::consts::SQRT_2);
    let f0 = f.value(x);
    let mut vals = [0.0; STENCIL];
    let mut k = 0;
    for j in -HALF..=HALF {
        for i in -HALF..=HALF {
            vals[k] = f.value(x + Vec2d::new(f64::from(i), f64::from(j)) * s) - f0;
            k += 1;
        }
    }
    let proj = projector();
    let coef: Vec<f64> = proj.iter().map(|row| row.iter().zip(&vals).map(|(a, b)| a * b).sum()).collect();
    let mut ss = 0.0;
    k = 0;
    for j in -HALF..=HALF {
        for i in -HALF..=HALF {
            let b = basis(i, j);
            let fit: f64 = b.iter().zip(&coef).map(|(a, c)| a * c).sum();
            ss += (vals[k] - fit).powi(2);
            k += 1;
        }
    }
    let inv = 1.0 / (s * s);
    let hessian = Mat2d::new(coef[3] * inv, coef[4] * inv, coef[4] * inv, coef[5] * inv);
    Ok(HessianEstimate { hessian, residual: (ss / STENCIL as f64).sqrt(), radius: r })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct W2pOptions {
    /// Width of the excluded boundary strip.
    pub collar: f64,
    /// Upper bound on the fitting radius.
    pub r_max: f64,
}

impl Default for W2pOptions {
    fn default() -> Self {
        W2pOptions { collar: 0.0, r_max: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct W2pEstimate {
    pub p: f64,
    /// `Σ ‖D²ψ‖^p · mesh²` over the covered mesh squares.
    pub integral: f64,
    /// `integral^{1/p}`.
    pub norm: f64,
    pub covered_area: f64,
    pub excluded_area: f64,
    /// Norm with the integral scaled up to the full domain area.
    pub extrapolated_norm: f64,
    pub samples: usize,
}

/// Hessian norms at the centres of a square mesh, excluding a boundary
/// collar; the fitting radius is `min(dist/2, r_max)`, raised to the
/// resolution floor where the disk still fits.
pub fn hessian_field<F: ScalarField + ?Sized>(f: &F, domain: &Polygon, mesh: f64, opts: &W2pOptions) -> Vec<(Vec2d, f64, HessianEstimate)> {
    let (lo, hi) = domain.bounds();
    let nx = ((hi.x - lo.x) / mesh).ceil() as usize;
    let ny = ((hi.y - lo.y) / mesh).ceil() as usize;
    let pts: Vec<Vec2d> = (0..ny).flat_map(|j| (0..nx).map(move |i| lo + Vec2d::new((i as f64 + 0.5) * mesh, (j as f64 + 0.5) * mesh))).collect();
    pts.par_iter()
        .filter_map(|&x| {
            let d = domain.depth(x);
            if d < opts.collar.max(f64::MIN_POSITIVE) {
                return None;
            }
            let r = (0.5 * d).min(opts.r_max).max(3.0 * f.resolution(x));
            if r > d {
                return None;
            }
            hessian_estimate(f, Some(domain), x, r).ok().map(|h| (x, d, h))
        })
        .collect()
}

pub fn w2p_norm<F: ScalarField + ?Sized>(f: &F, domain: &Polygon, p: f64, mesh: f64, opts: &W2pOptions) -> Result<W2pEstimate> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidInput("p must be positive and finite".into()));
    }
    let field = hessian_field(f, domain, mesh, opts);
    Ok(w2p_from_field(&field, domain.area(), p, mesh))
}

/// Quadrature of a precomputed Hessian field.
pub fn w2p_from_field(field: &[(Vec2d, f64, HessianEstimate)], area: f64, p: f64, mesh: f64) -> W2pEstimate {
    let cell = mesh * mesh;
    let integral: f64 = field.iter().map(|(_, _, h)| h.norm().powf(p) * cell).sum();
    let covered = field.len() as f64 * cell;
    let norm = integral.powf(1.0 / p);
    let extrapolated = if covered > 0.0 { (integral * area / covered).powf(1.0 / p) } else { f64::NAN };
    W2pEstimate { p, integral, norm, covered_area: covered, excluded_area: (area - covered).max(0.0), extrapolated_norm: extrapolated, samples: field.len() }
}
