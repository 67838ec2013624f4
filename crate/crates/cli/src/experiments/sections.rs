//! Experiments built on centred sections.

use otreg_core::analysis::{CentringOptions, EccentricityCurve, IndexedPotential};
use otreg_core::geometry::angle;
use otreg_core::solver::legendre_dual;
use otreg_core::Vec2d;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::*;
use crate::config::{HeightRange, PointSet};
use crate::output::Svg;
use crate::report::SolverMeta;

type Curves = Vec<(String, Vec2d, Option<EccentricityCurve>)>;

/// One curve per base point; failures are noted and leave `None`.
fn curves(psi: &IndexedPotential, pts: &[(String, Vec2d)], h: &HeightRange, scale: f64, notes: &mut Vec<String>) -> Curves {
    let opts = curve_options(h);
    let out: Vec<_> = pts.par_iter().map(|(_, x)| psi.eccentricity_curve(*x, h.h_max * scale, h.h_min * scale, &opts)).collect();
    pts.iter()
        .zip(out)
        .map(|((label, x), c)| match c {
            Ok(c) => {
                for (h, why) in &c.skipped {
                    notes.push(format!("{label}: h = {h:e} skipped: {why}"));
                }
                (label.clone(), *x, Some(c))
            }
            Err(e) => {
                notes.push(format!("{label}: no curve: {e}"));
                (label.clone(), *x, None)
            }
        })
        .collect()
}

fn sections_svg(ctx: &Context, curves: &Curves) -> String {
    let mut svg = Svg::new(&[&ctx.source]);
    svg.polygon(&ctx.source, "domain");
    for (_, x, c) in curves {
        svg.point(*x, "base");
        if let Some(c) = c {
            for s in c.samples.iter().step_by(4) {
                svg.polygon(&s.section.polygon, "section");
                svg.ellipse(&s.ellipse, "ellipse");
            }
        }
    }
    svg.finish()
}

fn curve_file(i: usize, label: &str) -> String {
    format!("eccentricity_{i:02}_{label}.csv")
}

pub fn eccentricity_growth(ctx: &Context, points: &PointSet, heights: &HeightRange, bootstrap: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let pts = base_points(points, &ctx.source);
    let cs = curves(&ctx.psi, &pts, heights, 1.0, &mut out.notes);
    let mut exps = Vec::new();
    for (i, (label, x, c)) in cs.iter().enumerate() {
        let file = curve_file(i, label);
        let Some(c) = c else {
            exps.push(None);
            continue;
        };
        out.tables.push(curve_table(file.clone(), c));
        let inv_h: Vec<f64> = c.heights().iter().map(|h| 1.0 / h).collect();
        if inv_h.len() < 3 {
            out.notes.push(format!("{label}: only {} resolvable heights", inv_h.len()));
            exps.push(None);
            continue;
        }
        let fit = power_fit(label, *x, &inv_h, &c.etas(), bootstrap, sub_seed(ctx.cfg.seed, i), &file)?;
        exps.push(Some((fit.exponent, fit.ci[1])));
        out.exponents.push(fit);
        out.metrics.insert(format!("h_reached_{label}"), c.samples.last().map_or(f64::NAN, |s| s.h));
    }
    let e = |f: fn(&(f64, f64)) -> f64| exps.iter().map(move |v| v.as_ref().map_or(f64::NAN, f));
    out.values.insert("max_exponent", max_of(e(|v| v.0)));
    out.values.insert("max_abs_exponent", max_of(e(|v| v.0.abs())));
    out.values.insert("max_ci_upper", max_of(e(|v| v.1)));
    out.svgs.push(("sections.svg".into(), sections_svg(ctx, &cs)));
    Ok(out)
}

pub fn volume_bounds(ctx: &Context, points: &PointSet, heights: &HeightRange) -> Result<Outcome> {
    let mut out = Outcome::default();
    let pts = base_points(points, &ctx.source);
    let cs = curves(&ctx.psi, &pts, heights, 1.0, &mut out.notes);
    let (mut band_in, mut band_full) = (Vec::new(), Vec::new());
    for (i, (label, _, c)) in cs.iter().enumerate() {
        let Some(c) = c else {
            band_in.push(f64::NAN);
            band_full.push(f64::NAN);
            continue;
        };
        out.tables.push(curve_table(curve_file(i, label), c));
        let vin: Vec<f64> = c.samples.iter().map(|s| s.vol_ratio_in).collect();
        let vfull: Vec<f64> = c.samples.iter().map(|s| s.vol_ratio_full).collect();
        let (bi, bf) = (band(&vin), band(&vfull));
        out.metrics.insert(format!("band_in_{label}"), bi);
        out.metrics.insert(format!("band_full_{label}"), bf);
        band_in.push(bi);
        band_full.push(bf);
    }
    out.values.insert("max_band_in", max_of(band_in));
    out.values.insert("max_band_full", max_of(band_full));
    out.svgs.push(("sections.svg".into(), sections_svg(ctx, &cs)));
    Ok(out)
}

/// Largest `η(h/M)/η(h)` per point, pairing a curve with its copy scaled by `1/M`.
fn step_ratios(psi: &IndexedPotential, pts: &[(String, Vec2d)], heights: &HeightRange, m: f64, suffix: &str, out: &mut Outcome) -> f64 {
    let upper = curves(psi, pts, heights, 1.0, &mut out.notes);
    let lower = curves(psi, pts, heights, 1.0 / m, &mut out.notes);
    let mut all = Vec::new();
    for (i, ((label, _, a), (_, _, b))) in upper.iter().zip(&lower).enumerate() {
        let (Some(a), Some(b)) = (a, b) else {
            all.push(f64::NAN);
            continue;
        };
        let mut t = Table::new(format!("step_{i:02}_{label}{suffix}.csv"), &["h", "eta_h", "eta_h_over_m", "ratio"]);
        for sa in &a.samples {
            if let Some(sb) = b.samples.iter().find(|sb| (sb.h * m / sa.h - 1.0).abs() < 1e-9) {
                let r = sb.eta / sa.eta;
                t.push(vec![sa.h, sa.eta, sb.eta, r]);
                all.push(r);
            }
        }
        out.tables.push(t);
    }
    max_of(all)
}

pub fn eccentricity_step(ctx: &Context, points: &PointSet, heights: &HeightRange, m: f64, refine: Option<usize>) -> Result<Outcome> {
    let mut out = Outcome::default();
    let pts = base_points(points, &ctx.source);
    let coarse = step_ratios(&ctx.psi, &pts, heights, m, "", &mut out);
    out.values.insert("max_ratio", coarse);
    if let Some(f) = refine {
        let (sol, psi) = ctx.refined(f)?;
        out.extra_solves.push(SolverMeta::from(sol.as_ref()));
        let fine = step_ratios(&psi, &pts, heights, m, "_refined", &mut out);
        out.metrics.insert("max_ratio_refined".into(), fine);
        out.values.insert("refinement_change", (fine - coarse).abs() / coarse);
    }
    Ok(out)
}

pub fn engulfing(ctx: &Context, points: &PointSet, h: f64, t: f64, t_bar: f64, pairs: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let opts = CentringOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut svg = Svg::new(&[&ctx.source]);
    svg.polygon(&ctx.source, "domain");
    let mut jobs = Vec::new();
    for (label, x0) in base_points(points, &ctx.source) {
        let s0 = match ctx.psi.centred_section(x0, h, None, &opts) {
            Ok(s) => s,
            Err(e) => {
                out.notes.push(format!("{label}: no section: {e}"));
                jobs.push((x0, None));
                continue;
            }
        };
        svg.polygon(&s0.polygon, "section");
        svg.polygon(&s0.polygon.dilate(x0, t_bar), "ellipse");
        if t == 0.0 {
            jobs.push((x0, Some(x0)));
            continue;
        }
        let region = s0.polygon.dilate(x0, t);
        let (lo, hi) = region.bounds();
        for _ in 0..pairs {
            let x1 =
                (0..10_000).map(|_| Vec2d::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y))).find(|&p| region.contains(p) && ctx.source.contains(p));
            match x1 {
                Some(x1) => svg.point(x1, "base"),
                None => out.notes.push(format!("{label}: no sample point in the dilated section")),
            }
            jobs.push((x0, x1));
        }
    }
    let results: Vec<_> = jobs.par_iter().map(|&(x0, x1)| x1.map(|x1| ctx.psi.check_engulfing(x0, x1, h, t, t_bar, &opts))).collect();
    let mut table = Table::new("engulfing.csv", &["x0x", "x0y", "x1x", "x1y", "h", "t", "t_bar", "s_bar", "capped"]);
    let mut s_bars = Vec::new();
    for ((x0, x1), r) in jobs.iter().zip(results) {
        match (x1, r) {
            (Some(x1), Some(Ok(e))) => {
                table.push(vec![x0.x, x0.y, x1.x, x1.y, h, t, t_bar, e.s_bar, f64::from(u8::from(e.capped))]);
                s_bars.push(e.s_bar);
            }
            (_, Some(Err(e))) => {
                out.notes.push(format!("engulfing at {x0:?}: {e}"));
                s_bars.push(f64::NAN);
            }
            _ => s_bars.push(f64::NAN),
        }
    }
    out.values.insert("min_s_bar", min_of(s_bars));
    out.tables.push(table);
    out.svgs.push(("engulfing.svg".into(), svg.finish()));
    Ok(out)
}

pub fn duality(ctx: &Context, pairs: usize, heights: &HeightRange) -> Result<Outcome> {
    let mut out = Outcome::default();
    let phi = IndexedPotential::new(legendre_dual(&ctx.sol))?;
    let opts = curve_options(heights);
    let jobs: Vec<(f64, Vec2d, Vec2d)> = (0..pairs)
        .map(|k| {
            let s = (k as f64 + 0.25) / pairs as f64;
            let x0 = ctx.source.point_at_arc(s);
            (s, x0, closest_on_boundary(&ctx.target, ctx.psi.slope(x0)))
        })
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(_, x0, y0)| {
            let p = ctx.psi.eccentricity_curve(x0, heights.h_max, heights.h_min, &opts)?;
            let d = phi.eccentricity_curve(y0, heights.h_max, heights.h_min, &opts)?;
            Ok::<_, otreg_core::Error>((p, d))
        })
        .collect();
    let mut table = Table::new("duality.csv", &["arc_param", "x0x", "x0y", "y0x", "y0y", "h", "eta_primal", "eta_dual", "eta_ratio", "axis_angle_deg"]);
    let mut svg = Svg::new(&[&ctx.source, &ctx.target]);
    svg.polygon(&ctx.source, "domain");
    svg.polygon(&ctx.target, "target");
    let (mut ratios, mut angles) = (Vec::new(), Vec::new());
    for (k, (&(s, x0, y0), r)) in jobs.iter().zip(results).enumerate() {
        let (p, d) = match r {
            Ok(v) => v,
            Err(e) => {
                out.notes.push(format!("pair {k}: {e}"));
                ratios.push(f64::NAN);
                continue;
            }
        };
        let mut matched = 0;
        for sp in &p.samples {
            let Some(sd) = d.samples.iter().find(|sd| (sd.h / sp.h - 1.0).abs() < 1e-9) else { continue };
            let ratio = (sd.eta / sp.eta).max(sp.eta / sd.eta);
            let a = angle(sd.ellipse.e_long, sp.ellipse.e_short())?;
            let a = a.min(std::f64::consts::PI - a).to_degrees();
            table.push(vec![s, x0.x, x0.y, y0.x, y0.y, sp.h, sp.eta, sd.eta, ratio, a]);
            ratios.push(ratio);
            angles.push(a);
            if matched == 2 && k % 4 == 0 {
                svg.polygon(&sp.section.polygon, "section");
                svg.ellipse(&sp.ellipse, "ellipse");
                svg.polygon(&sd.section.polygon, "dual");
                svg.ellipse(&sd.ellipse, "ellipse");
            }
            matched += 1;
        }
        if matched == 0 {
            out.notes.push(format!("pair {k}: no common resolvable height"));
            ratios.push(f64::NAN);
        }
    }
    let mut sorted: Vec<f64> = ratios.iter().copied().filter(|r| !r.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    if !sorted.is_empty() {
        out.metrics.insert("median_eta_ratio".into(), sorted[sorted.len() / 2]);
    }
    out.values.insert("max_eta_ratio", max_of(ratios));
    out.values.insert("max_axis_angle_deg", max_of(angles));
    out.tables.push(table);
    out.svgs.push(("duality.svg".into(), svg.finish()));
    Ok(out)
}
