use serde::{Deserialize, Serialize};

use super::curve::height_grid;
use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LinearFit};
use crate::Vec2d;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CornerOptions {
    pub s_min: f64,
    pub s_max: f64,
    pub samples_per_decade: usize,
    /// Values of `u` at or below this are treated as numerically zero.
    pub value_floor: f64,
}

impl Default for CornerOptions {
    fn default() -> Self {
        CornerOptions { s_min: 1e-3, s_max: 0.3, samples_per_decade: 8, value_floor: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerGrowth {
    pub exponent: f64,
    pub fit: LinearFit,
    /// `(s, u(s))` pairs entering the fit.
    pub samples: Vec<(f64, f64)>,
    /// Samples dropped for being below the value floor.
    pub excluded: usize,
}

/// Growth exponent of `u(s) = f(x₀ + s e) − f(x₀) − s p₀·e` along a ray.
pub fn corner_growth<F: ScalarField + ?Sized>(f: &F, x0: Vec2d, e: Vec2d, p0: Vec2d, opts: &CornerOptions) -> Result<CornerGrowth> {
    let e = e.normalized().ok_or(Error::ZeroVector)?;
    if !(opts.s_max > opts.s_min && opts.s_min > 0.0) {
        return Err(Error::InvalidInput("need s_max > s_min > 0".into()));
    }
    let f0 = f.value(x0);
    let mut samples = Vec::new();
    let mut excluded = 0;
    for s in height_grid(opts.s_max, opts.s_min, opts.samples_per_decade) {
        let u = f.value(x0 + e * s) - f0 - s * p0.dot(e);
        if u > opts.value_floor {
            samples.push((s, u));
        } else {
            excluded += 1;
        }
    }
    samples.reverse();
    if samples.len() < 3 {
        return Err(Error::InvalidInput("fewer than three resolvable samples".into()));
    }
    let (s, u): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let fit = log_log_fit(&s, &u)?;
    Ok(CornerGrowth { exponent: fit.slope, fit, samples, excluded })
}
