use serde::{Deserialize, Serialize};

use super::field::IndexedPotential;
use super::section::CentringOptions;
use crate::error::{Error, Result};
use crate::Vec2d;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Engulfing {
    /// Largest tested `s` with `S_{sh}(x₁) ⊂ x₀ + t̄(S_h(x₀) − x₀)`.
    pub s_bar: f64,
    /// True when the search hit its upper cap while still passing.
    pub capped: bool,
}

const S_CAP: f64 = 64.0;
const S_FLOOR: f64 = 1.0 / 1048576.0;

impl IndexedPotential {
    /// Empirical engulfing threshold for centred sections.
    pub fn check_engulfing(&self, x0: Vec2d, x1: Vec2d, h: f64, t: f64, t_bar: f64, opts: &CentringOptions) -> Result<Engulfing> {
        if !(t >= 0.0 && t_bar > 0.0 && h > 0.0) {
            return Err(Error::Precondition("need h > 0, t ≥ 0 and t̄ > 0".into()));
        }
        let s0 = self.centred_section(x0, h, None, opts)?;
        let diam = s0.polygon.diameter();
        let tol = 1e-9 * diam;
        let inside = if t == 0.0 { x1.dist(x0) <= tol } else { s0.polygon.dilate(x0, t).contains_with_tol(x1, tol) };
        if !inside {
            return Err(Error::Precondition("x₁ is not in the t-dilation of the section at x₀".into()));
        }
        let outer = s0.polygon.dilate(x0, t_bar);
        let warm = if x1 == x0 { Some(s0.slope) } else { None };
        let pass = |s: f64| -> bool { self.centred_section(x1, s * h, warm, opts).is_ok_and(|sec| outer.contains_polygon(&sec.polygon, tol)) };
        let (mut lo, mut hi);
        if pass(1.0) {
            lo = 1.0;
            hi = 2.0;
            while pass(hi) {
                lo = hi;
                if hi >= S_CAP {
                    return Ok(Engulfing { s_bar: lo, capped: true });
                }
                hi *= 2.0;
            }
        } else {
            hi = 1.0;
            lo = 0.5;
            while !pass(lo) {
                hi = lo;
                lo *= 0.5;
                if lo < S_FLOOR {
                    return Ok(Engulfing { s_bar: 0.0, capped: false });
                }
            }
        }
        for _ in 0..24 {
            let mid = 0.5 * (lo + hi);
            if pass(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Engulfing { s_bar: lo, capped: false })
    }
}
