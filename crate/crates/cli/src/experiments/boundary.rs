//! Boundary behaviour: tangent-ray obliqueness and growth at corners.

use otreg_core::analysis::{corner_growth, obliqueness_check, CornerOptions, ObliquenessOptions};
use otreg_core::Vec2d;
use rayon::prelude::*;

use super::*;
use crate::config::Anchor;
use crate::output::Svg;

pub fn obliqueness(ctx: &Context, samples: usize, max_ray_cells: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let opts = ObliquenessOptions { max_ray_cells };
    let params: Vec<f64> = (0..samples).map(|k| k as f64 / samples as f64).collect();
    let results: Vec<_> = params.par_iter().map(|&s| obliqueness_check(&ctx.psi, &ctx.target, ctx.source.point_at_arc(s), &opts)).collect();
    let mut t = Table::new("obliqueness.csv", &["arc_param", "x0x", "x0y", "LdotL", "RdotR", "margin"]);
    let mut svg = Svg::new(&[&ctx.source, &ctx.target]);
    svg.polygon(&ctx.source, "domain");
    svg.polygon(&ctx.target, "target");
    let len = 0.05 * ctx.source.diameter();
    let mut margins = Vec::new();
    let mut longest: f64 = 0.0;
    for (k, (s, r)) in params.iter().zip(results).enumerate() {
        match r {
            Ok(o) => {
                t.push(vec![*s, o.x0.x, o.x0.y, o.l_dot, o.r_dot, o.margin]);
                margins.push(o.margin);
                longest = longest.max(o.ray_length);
                if k % (samples / 20).max(1) == 0 {
                    svg.ray(o.x0, o.left, len, "ray");
                    svg.ray(o.x0, o.right, len, "ray");
                    svg.ray(o.y_cw, o.left_dual, len, "dual");
                    svg.ray(o.y_ccw, o.right_dual, len, "dual");
                }
            }
            Err(e) => {
                out.notes.push(format!("arc {s}: {e}"));
                margins.push(f64::NAN);
            }
        }
    }
    let min = min_of(margins.iter().copied());
    out.values.insert("min_margin", min);
    out.values.insert("weak_form", min);
    out.metrics.insert("longest_ray".into(), longest);
    out.tables.push(t);
    out.svgs.push(("rays.svg".into(), svg.finish()));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn corner(ctx: &Context, base: [f64; 2], direction: [f64; 2], anchor: &Anchor, s_min_cells: f64, s_max: f64, spd: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let x0 = Vec2d::new(base[0], base[1]);
    let e = Vec2d::new(direction[0], direction[1]);
    let p0 = match anchor {
        Anchor::Slope => ctx.psi.slope(x0),
        Anchor::Point([x, y]) => Vec2d::new(*x, *y),
        Anchor::TargetVertex => {
            let g = ctx.psi.slope(x0);
            *ctx.target.vertices().iter().min_by(|a, b| a.dist(g).total_cmp(&b.dist(g))).expect("target has vertices")
        }
    };
    let opts = CornerOptions { s_min: s_min_cells * ctx.sol.cell_size(), s_max, samples_per_decade: spd, ..CornerOptions::default() };
    let g = corner_growth(&ctx.psi, x0, e, p0, &opts)?;
    let mut t = Table::new("corner.csv", &["s", "u"]);
    for &(s, u) in &g.samples {
        t.push(vec![s, u]);
    }
    let (s, u): (Vec<f64>, Vec<f64>) = g.samples.iter().copied().unzip();
    let fit = power_fit("corner", x0, &s, &u, 200, ctx.cfg.seed, "corner.csv")?;
    out.values.insert("exponent", g.exponent);
    out.metrics.insert("anchor_x".into(), p0.x);
    out.metrics.insert("anchor_y".into(), p0.y);
    out.metrics.insert("s_min".into(), opts.s_min);
    out.metrics.insert("excluded".into(), g.excluded as f64);
    out.exponents.push(fit);
    out.tables.push(t);
    let mut svg = Svg::new(&[&ctx.source, &ctx.target]);
    svg.polygon(&ctx.source, "domain");
    svg.polygon(&ctx.target, "target");
    svg.ray(x0, e.normalized().unwrap_or(e), s_max, "ray");
    svg.point(p0, "base");
    out.svgs.push(("corner.svg".into(), svg.finish()));
    Ok(out)
}
