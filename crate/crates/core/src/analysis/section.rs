use serde::{Deserialize, Serialize};

use super::field::IndexedPotential;
use crate::error::{Error, Result};
use crate::geometry::clip_into;
use crate::{Mat2d, Polygon, Vec2d};

/// Sublevel set `{x : ψ(x) < ψ(x₀) + p·(x − x₀) + h}` within the evaluation box.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Section {
    pub polygon: Polygon,
    pub base: Vec2d,
    pub slope: Vec2d,
    pub height: f64,
    pub centred: bool,
    /// Number of domain cells meeting the section.
    pub cells: usize,
    /// `‖centroid − x₀‖ / diam`.
    pub centring_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CentringOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for CentringOptions {
    fn default() -> Self {
        CentringOptions { tol: 1e-6, max_iter: 200, damping: 0.5 }
    }
}

impl IndexedPotential {
    /// Exact section as a half-plane intersection. Only pieces whose cell
    /// reaches the affine cap can bound the section, so the others are skipped.
    pub fn section(&self, x0: Vec2d, p: Vec2d, h: f64) -> Result<Section> {
        if !(h > 0.0) {
            return Err(Error::EmptySection);
        }
        let psi0 = self.value_at(x0);
        // cap ℓ(x) = p·x + l0
        let l0 = psi0 - p.dot(x0) + h;
        let scale = psi0.abs() + h + p.norm() * (x0.norm() + self.bbox.diameter());
        let slack = 1e-12 * scale;
        let pieces = &self.potential.pieces;
        let mut poly: Vec<Vec2d> = self.bbox.vertices().to_vec();
        let mut buf = Vec::with_capacity(64);
        let mut cells = 0;
        for (i, cell) in self.cells.iter().enumerate() {
            let Some(cell) = cell else { continue };
            let pc = pieces[i];
            let below = cell.vertices().iter().any(|&v| pc.eval(v) - p.dot(v) - l0 <= slack);
            if !below {
                continue;
            }
            if let Some(dc) = &self.domain_cells[i] {
                if dc.vertices().iter().any(|&v| pc.eval(v) - p.dot(v) - l0 < 0.0) {
                    cells += 1;
                }
            }
            let n = pc.slope - p;
            clip_into(&poly, n, pc.intercept + l0, &mut buf);
            std::mem::swap(&mut poly, &mut buf);
            if poly.len() < 3 {
                return Err(Error::EmptySection);
            }
        }
        let polygon = Polygon::from_ccw_unchecked(poly).ok_or(Error::EmptySection)?;
        Ok(Section { polygon, base: x0, slope: p, height: h, centred: false, cells, centring_residual: f64::NAN, iterations: 0 })
    }

    fn value_at(&self, x: Vec2d) -> f64 {
        self.argmax(x).1
    }

    /// Section whose centroid is `x₀`, found by a damped fixed-point iteration
    /// on the slope preconditioned by the normalized section covariance.
    pub fn centred_section(&self, x0: Vec2d, h: f64, start: Option<Vec2d>, opts: &CentringOptions) -> Result<Section> {
        let mut p = start.unwrap_or_else(|| {
            let g = self.potential.gradient(x0);
            g.iter().fold(Vec2d::zero(), |s, &v| s + v) / g.len() as f64
        });
        let eval = |p: Vec2d| -> Result<(Section, Vec2d, Mat2d, f64)> {
            let s = self.section(x0, p, h)?;
            let m = s.polygon.moments();
            let r = (x0 - m.centroid).norm() / s.polygon.diameter();
            Ok((s, m.centroid, m.covariance, r))
        };
        let (mut sec, mut c, mut cov, mut r) = eval(p)?;
        let mut it = 0;
        while r > opts.tol {
            if it == opts.max_iter {
                return Err(Error::CentringFailed { iterations: it, residual: r });
            }
            it += 1;
            let det = cov.det();
            let m = cov.scale(1.0 / det.max(f64::MIN_POSITIVE).sqrt());
            let dir = m.inverse().map(|mi| mi * (x0 - c)).unwrap_or(x0 - c);
            let mut tau = opts.damping;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = p + dir * tau;
                if let Ok((s2, c2, cov2, r2)) = eval(trial) {
                    if r2 < r {
                        p = trial;
                        (sec, c, cov, r) = (s2, c2, cov2, r2);
                        accepted = true;
                        break;
                    }
                }
                tau *= 0.5;
            }
            if !accepted {
                return Err(Error::CentringFailed { iterations: it, residual: r });
            }
        }
        sec.centred = true;
        sec.centring_residual = r;
        sec.iterations = it;
        Ok(sec)
    }
}
