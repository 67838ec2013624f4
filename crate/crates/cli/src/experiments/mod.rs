//! The named experiments. Each returns its tables, figures and the values
//! its checks compare against the configured thresholds.

mod boundary;
mod regularity;
mod sections;

use std::collections::BTreeMap;

use otreg_core::analysis::{CurveOptions, EccentricityCurve};
use otreg_core::fit::{bootstrap_log_log, log_log_fit};
use otreg_core::{Polygon, Vec2d};

use crate::config::{Experiment, HeightRange, PointSet};
use crate::error::Result;
use crate::output::Table;
use crate::report::{ExponentFit, SolverMeta};
use crate::run::Context;

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub svgs: Vec<(String, String)>,
    pub metrics: BTreeMap<String, f64>,
    pub exponents: Vec<ExponentFit>,
    pub values: BTreeMap<&'static str, f64>,
    pub notes: Vec<String>,
    pub extra_solves: Vec<SolverMeta>,
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    match &ctx.cfg.experiment {
        Experiment::EccentricityGrowth { points, heights, bootstrap } => sections::eccentricity_growth(ctx, points, heights, *bootstrap),
        Experiment::VolumeBounds { points, heights } => sections::volume_bounds(ctx, points, heights),
        Experiment::EccentricityStep { points, heights, m, refine } => sections::eccentricity_step(ctx, points, heights, *m, *refine),
        Experiment::Engulfing { points, h, t, t_bar, pairs_per_point } => sections::engulfing(ctx, points, *h, *t, *t_bar, *pairs_per_point),
        Experiment::DualityEllipse { pairs, heights } => sections::duality(ctx, *pairs, heights),
        Experiment::HessianGrowth { mesh, bootstrap } => regularity::hessian_growth(ctx, mesh, *bootstrap),
        Experiment::W2pTable { p_list, mesh, refine } => regularity::w2p_table(ctx, p_list, mesh, *refine),
        Experiment::ObliquenessScan { samples, max_ray_cells } => boundary::obliqueness(ctx, *samples, *max_ray_cells),
        Experiment::CornerGrowth { base, direction, anchor, s_min_cells, s_max, samples_per_decade } => {
            boundary::corner(ctx, *base, *direction, anchor, *s_min_cells, *s_max, *samples_per_decade)
        }
    }
}

/// Labelled base points: vertices `v*`, boundary arc points `a*`, the centroid `c`
/// and explicit points `p*`.
pub fn base_points(set: &PointSet, domain: &Polygon) -> Vec<(String, Vec2d)> {
    let mut out = Vec::new();
    if set.vertices {
        out.extend((0..domain.len()).map(|i| (format!("v{i}"), domain.vertex(i))));
    }
    let k = set.arc_samples;
    out.extend((0..k).map(|j| (format!("a{j}"), domain.point_at_arc((j as f64 + 0.5) / k as f64))));
    if set.centroid {
        out.push(("c".into(), domain.centroid()));
    }
    out.extend(set.explicit.iter().enumerate().map(|(i, &[x, y])| (format!("p{i}"), Vec2d::new(x, y))));
    out
}

pub fn curve_options(h: &HeightRange) -> CurveOptions {
    CurveOptions { samples_per_decade: h.samples_per_decade, min_cells: h.min_cells, ..CurveOptions::default() }
}

pub fn curve_table(file: String, c: &EccentricityCurve) -> Table {
    let mut t = Table::new(file, &["h", "eta", "vol_ratio_in", "vol_ratio_full", "centring_residual"]);
    for s in &c.samples {
        t.push(vec![s.h, s.eta, s.vol_ratio_in, s.vol_ratio_full, s.centring_residual]);
    }
    t
}

/// Exponent of `y ~ x^α` by least squares in log–log coordinates, with a
/// seeded bootstrap interval.
pub fn power_fit(label: &str, at: Vec2d, x: &[f64], y: &[f64], resamples: usize, seed: u64, csv: &str) -> Result<ExponentFit> {
    let fit = log_log_fit(x, y)?;
    let (lo, hi) = bootstrap_log_log(x, y, resamples, seed)?;
    Ok(ExponentFit { label: label.into(), x: [at.x, at.y], exponent: fit.slope, ci: [lo, hi], samples: x.len(), csv: csv.into() })
}

/// Distinct seed per measurement, derived from the configured one.
pub fn sub_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64)
}

/// Largest value; NaN when empty or when any value is NaN, so a missing
/// measurement can never pass a check.
pub fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter()
        .fold(None, |acc: Option<f64>, b| {
            Some(match acc {
                None => b,
                Some(a) if a.is_nan() || b.is_nan() => f64::NAN,
                Some(a) => a.max(b),
            })
        })
        .unwrap_or(f64::NAN)
}

pub fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    -max_of(v.into_iter().map(|x| -x))
}

/// `max/min` over a positive series.
pub fn band(v: &[f64]) -> f64 {
    max_of(v.iter().copied()) / min_of(v.iter().copied())
}

/// Nearest point of `∂p` to `x`.
pub fn closest_on_boundary(p: &Polygon, x: Vec2d) -> Vec2d {
    (0..p.len())
        .map(|i| {
            let (a, b) = p.edge(i);
            let d = b - a;
            a + d * ((x - a).dot(d) / d.dot(d)).clamp(0.0, 1.0)
        })
        .min_by(|u, w| u.dist(x).total_cmp(&w.dist(x)))
        .expect("polygon has edges")
}
