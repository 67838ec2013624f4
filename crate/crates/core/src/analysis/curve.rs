use serde::{Deserialize, Serialize};

use super::field::IndexedPotential;
use super::section::{CentringOptions, Section};
use crate::error::{Error, Result};
use crate::geometry::fit_ellipse;
use crate::{Ellipse2d, Vec2d};

/// One height of an eccentricity curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSample {
    pub h: f64,
    pub eta: f64,
    pub ellipse: Ellipse2d,
    /// `|S ∩ U₁| / h`.
    pub vol_ratio_in: f64,
    /// `|S| / h`.
    pub vol_ratio_full: f64,
    pub centring_residual: f64,
    pub section: Section,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EccentricityCurve {
    pub base: Vec2d,
    /// Strictly decreasing in `h`.
    pub samples: Vec<CurveSample>,
    /// Heights where centring failed, with the reason.
    pub skipped: Vec<(f64, String)>,
    /// Height at which the resolution floor stopped the sweep, if it did.
    pub floor: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveOptions {
    pub samples_per_decade: usize,
    /// Stop once a section meets fewer cells than this.
    pub min_cells: usize,
    /// Stop once a section's diameter is below this many local cell sizes.
    pub min_diameter_cells: f64,
    pub centring: CentringOptions,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions { samples_per_decade: 8, min_cells: 20, min_diameter_cells: 5.0, centring: CentringOptions::default() }
    }
}

/// Geometric grid `h_max·10^{−k/spd}` down to `h_min` (inclusive up to rounding).
pub fn height_grid(h_max: f64, h_min: f64, samples_per_decade: usize) -> Vec<f64> {
    let spd = samples_per_decade.max(1) as f64;
    let decades = (h_max / h_min).log10();
    let count = (decades * spd + 1e-9).floor() as usize;
    (0..=count).map(|k| h_max * 10f64.powf(-(k as f64) / spd)).collect()
}

impl IndexedPotential {
    /// Centred sections and fitted ellipses over a geometric height grid.
    pub fn eccentricity_curve(&self, x0: Vec2d, h_max: f64, h_min: f64, opts: &CurveOptions) -> Result<EccentricityCurve> {
        if !(h_max > h_min && h_min > 0.0) {
            return Err(Error::InvalidInput("need h_max > h_min > 0".into()));
        }
        let domain = self.domain();
        let mut curve = EccentricityCurve { base: x0, samples: Vec::new(), skipped: Vec::new(), floor: None };
        let mut warm: Option<Vec2d> = None;
        let local = self.local_cell_size(x0);
        for h in height_grid(h_max, h_min, opts.samples_per_decade) {
            let sec = match self.centred_section(x0, h, warm, &opts.centring) {
                Ok(s) => s,
                Err(e) => {
                    curve.skipped.push((h, e.to_string()));
                    continue;
                }
            };
            if sec.cells < opts.min_cells || sec.polygon.diameter() < opts.min_diameter_cells * local {
                curve.floor = Some(h);
                break;
            }
            warm = Some(sec.slope);
            let ellipse = fit_ellipse(&sec.polygon, h)?;
            let full = sec.polygon.area();
            let inside = sec.polygon.intersect(domain).map_or(0.0, |p| p.area());
            curve.samples.push(CurveSample {
                h,
                eta: ellipse.eccentricity(),
                ellipse,
                vol_ratio_in: inside / h,
                vol_ratio_full: full / h,
                centring_residual: sec.centring_residual,
                section: sec,
            });
        }
        Ok(curve)
    }
}

impl EccentricityCurve {
    pub fn heights(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.h).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.eta).collect()
    }
}
