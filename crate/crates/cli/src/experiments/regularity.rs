//! Second-derivative experiments.

use otreg_core::analysis::{hessian_field, w2p_from_field, HessianEstimate, W2pOptions};
use otreg_core::Vec2d;

use super::*;
use crate::config::MeshConfig;
use crate::report::SolverMeta;

fn hessian_table(field: &[(Vec2d, f64, HessianEstimate)], file: &str) -> Table {
    let mut t = Table::new(file, &["x", "y", "dist_to_boundary", "hess_norm", "fit_residual"]);
    for (x, d, h) in field {
        t.push(vec![x.x, x.y, *d, h.norm(), h.residual]);
    }
    t
}

fn options(ctx: &Context, mesh: &MeshConfig) -> W2pOptions {
    W2pOptions { collar: mesh.collar_cells * ctx.sol.cell_size(), r_max: mesh.r_max }
}

pub fn hessian_growth(ctx: &Context, mesh: &MeshConfig, bootstrap: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let opts = options(ctx, mesh);
    let field = hessian_field(&ctx.psi, &ctx.source, mesh.spacing, &opts);
    out.tables.push(hessian_table(&field, "hessian.csv"));
    out.metrics.insert("collar".into(), opts.collar);
    out.metrics.insert("samples".into(), field.len() as f64);
    let inv_d: Vec<f64> = field.iter().map(|f| 1.0 / f.1).collect();
    let norms: Vec<f64> = field.iter().map(|f| f.2.norm()).collect();
    match power_fit("hessian", ctx.source.centroid(), &inv_d, &norms, bootstrap, ctx.cfg.seed, "hessian.csv") {
        Ok(fit) => {
            out.values.insert("exponent", fit.exponent);
            out.values.insert("ci_upper", fit.ci[1]);
            out.exponents.push(fit);
        }
        Err(e) => out.notes.push(format!("no fit: {e}")),
    }
    Ok(out)
}

/// The boundary collar is sized from the coarse solve and shared by the
/// refined one, so both quadratures cover the same set.
pub fn w2p_table(ctx: &Context, p_list: &[f64], mesh: &MeshConfig, refine: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let opts = options(ctx, mesh);
    let (fine_sol, fine_psi) = ctx.refined(refine)?;
    out.extra_solves.push(SolverMeta::from(fine_sol.as_ref()));
    let coarse = hessian_field(&ctx.psi, &ctx.source, mesh.spacing, &opts);
    let fine = hessian_field(&fine_psi, &ctx.source, mesh.spacing, &opts);
    out.tables.push(hessian_table(&coarse, "hessian.csv"));
    out.tables.push(hessian_table(&fine, "hessian_refined.csv"));
    let mut t = Table::new("w2p.csv", &["p", "n_targets", "integral", "norm", "covered_area", "extrapolated_norm"]);
    let area = ctx.source.area();
    let mut changes = Vec::new();
    for &p in p_list {
        let a = w2p_from_field(&coarse, area, p, mesh.spacing);
        let b = w2p_from_field(&fine, area, p, mesh.spacing);
        for (w, n) in [(&a, ctx.sol.cloud.len()), (&b, fine_sol.cloud.len())] {
            t.push(vec![p, n as f64, w.integral, w.norm, w.covered_area, w.extrapolated_norm]);
        }
        let finite = a.norm.is_finite() && b.norm.is_finite() && a.samples > 0;
        let change = if finite { (b.norm - a.norm).abs() / a.norm } else { f64::NAN };
        out.metrics.insert(format!("relative_change_p{p}"), change);
        changes.push(change);
    }
    out.metrics.insert("collar".into(), opts.collar);
    out.values.insert("max_relative_change", max_of(changes));
    out.tables.push(t);
    Ok(out)
}
