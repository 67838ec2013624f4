use serde::{Deserialize, Serialize};

use super::cloud::{DualWeights, TargetCloud};
use super::linalg::{pcg_pinned, Csr};
use super::power::{power_cells, PowerDiagram};
use crate::error::{Error, Result};
use crate::geometry::{fit_ellipse, Mat2};
use crate::potential::PLConvexPotential;
use crate::{Polygon, Vec2d};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Stopping tolerance on `maxᵢ |area(cellᵢ) − νᵢ|`, relative to the source area.
    pub tol: f64,
    pub max_iter: usize,
    /// Domains whose fitted ellipse is more eccentric than this are rejected.
    pub max_eccentricity: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-7, max_iter: 100, max_eccentricity: 1e6 }
    }
}

/// How the starting weights were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    Voronoi,
    MomentMatched,
    Shrunk,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub source: Polygon,
    pub cloud: TargetCloud,
    pub weights: DualWeights,
    pub potential: PLConvexPotential<f64>,
    pub diagram: PowerDiagram,
    pub iterations: usize,
    /// Final `maxᵢ |area(cellᵢ) − νᵢ| / area(U₁)`.
    pub residual: f64,
    /// Relative ℓ² residual before each Newton step and at the end; strictly
    /// decreasing, since a step is accepted only if it reduces it.
    pub history: Vec<f64>,
    pub init: InitStrategy,
}

pub(crate) fn heights(points: &[Vec2d], w: &[f64]) -> Vec<f64> {
    points.iter().zip(w).map(|(y, w)| 0.5 * (y.norm_sq() - w)).collect()
}

/// Power diagram of the cloud with weights `w`, restricted to `u1`.
pub fn power_diagram(u1: &Polygon, cloud: &TargetCloud, w: &DualWeights) -> Result<PowerDiagram> {
    if w.0.len() != cloud.len() {
        return Err(Error::InvalidInput("weight count does not match the cloud".into()));
    }
    power_cells(u1, &cloud.points, &heights(&cloud.points, &w.0))
}

fn sqrt_spd(m: Mat2<f64>) -> Mat2<f64> {
    let e = m.sym_eigen();
    let (u, v) = (e.v_max, e.v_max.perp());
    Mat2::outer(u, u).scale(e.max.max(0.0).sqrt()) + Mat2::outer(v, v).scale(e.min.max(0.0).sqrt())
}

/// Weights of the conjugate of the quadratic whose gradient is the Gaussian
/// transport map between the first two moments of source and target.
fn moment_matched(u1: &Polygon, cloud: &TargetCloud) -> Option<DualWeights> {
    let m1 = u1.moments();
    let n = cloud.len() as f64;
    let ybar = cloud.points.iter().fold(Vec2d::zero(), |s, &p| s + p) / n;
    let mut c2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    for &p in &cloud.points {
        let d = p - ybar;
        c2 = c2 + Mat2::outer(d, d).scale(1.0 / n);
    }
    let s1 = sqrt_spd(m1.covariance);
    let s1inv = s1.inverse()?;
    let b = s1inv * sqrt_spd((s1 * c2 * s1).symmetrized()) * s1inv;
    let binv = b.symmetrized().inverse()?;
    let w = cloud
        .points
        .iter()
        .map(|&y| {
            let d = y - ybar;
            let c = m1.centroid.dot(d) + 0.5 * d.dot(binv * d);
            y.norm_sq() - 2.0 * c
        })
        .collect();
    Some(DualWeights(w).gauge_fixed())
}

/// Weights whose power diagram is the Voronoi diagram of the cloud shrunk
/// homothetically into the interior of `u1`, so no cell is empty.
fn shrunk(u1: &Polygon, cloud: &TargetCloud) -> Option<DualWeights> {
    let xbar = u1.centroid();
    let n = cloud.len() as f64;
    let ybar = cloud.points.iter().fold(Vec2d::zero(), |s, &p| s + p) / n;
    let mut t = 1.0;
    for _ in 0..60 {
        let a = xbar - ybar * t;
        if cloud.points.iter().all(|&y| u1.depth(a + y * t) > 0.0) {
            let w = cloud.points.iter().map(|&y| (1.0 - t) * y.norm_sq() - 2.0 * a.dot(y)).collect();
            return Some(DualWeights(w).gauge_fixed());
        }
        t *= 0.5;
    }
    None
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton iteration on the dual weights of semi-discrete transport
/// from the uniform measure on `u1` to the cloud.
pub fn newton_solve(u1: &Polygon, cloud: &TargetCloud, opts: &SolverOptions) -> Result<Solution> {
    let area = u1.area();
    let n = cloud.len();
    let total = cloud.total_mass();
    if (total - area).abs() > 1e-12 * area {
        return Err(Error::InvalidInput(format!("target mass {total} does not match source area {area}")));
    }
    if n > 1 && cloud.masses.iter().any(|&m| m >= area) {
        return Err(Error::InvalidInput("every target mass must be smaller than the source area".into()));
    }
    for p in [u1, &cloud.domain] {
        let eta = fit_ellipse(p, p.area())?.eccentricity();
        if eta > opts.max_eccentricity {
            return Err(Error::DegenerateDomain(eta));
        }
    }

    let mut init = InitStrategy::Voronoi;
    let mut w = DualWeights::zeros(n);
    let mut diagram = power_diagram(u1, cloud, &w)?;
    if diagram.nonempty() < n {
        if let Some(mw) = moment_matched(u1, cloud) {
            let d = power_diagram(u1, cloud, &mw)?;
            if d.nonempty() == n {
                init = InitStrategy::MomentMatched;
                w = mw;
                diagram = d;
            }
        }
    }
    if diagram.nonempty() < n {
        let sw = shrunk(u1, cloud).ok_or(Error::Disconnected)?;
        diagram = power_diagram(u1, cloud, &sw)?;
        init = InitStrategy::Shrunk;
        w = sw;
    }
    if diagram.nonempty() < n || !diagram.is_connected() {
        return Err(Error::Disconnected);
    }
    let min_area = diagram.areas.iter().copied().fold(f64::INFINITY, f64::min);
    let min_mass = cloud.masses.iter().copied().fold(f64::INFINITY, f64::min);
    let eps0 = 0.5 * min_area.min(min_mass);

    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let r: Vec<f64> = diagram.areas.iter().zip(&cloud.masses).map(|(a, m)| a - m).collect();
        let err = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        history.push(l2(&r) / area);
        if err <= opts.tol * area || n == 1 {
            break;
        }
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence { iterations, residual: err / area });
        }
        let mut trip = Vec::with_capacity(4 * diagram.adjacency.len());
        for a in &diagram.adjacency {
            let v = a.length / (2.0 * a.distance);
            trip.push((a.i, a.i, v));
            trip.push((a.j, a.j, v));
            trip.push((a.i, a.j, -v));
            trip.push((a.j, a.i, -v));
        }
        let hess = Csr::from_triplets(n, trip);
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let (delta, _) = pcg_pinned(&hess, &rhs, 0, 1e-11, 20 * n + 200);

        let rnorm = l2(&r);
        let mut tau = 1.0;
        loop {
            let trial = DualWeights(w.0.iter().zip(&delta).map(|(w, d)| w + tau * d).collect());
            let d = power_diagram(u1, cloud, &trial)?;
            let min_a = d.areas.iter().copied().fold(f64::INFINITY, f64::min);
            let rn = l2(&d.areas.iter().zip(&cloud.masses).map(|(a, m)| a - m).collect::<Vec<_>>());
            if min_a >= eps0 && rn <= (1.0 - 0.5 * tau) * rnorm {
                w = trial.gauge_fixed();
                diagram = d;
                break;
            }
            tau *= 0.5;
            if tau < 1e-10 {
                return Err(Error::NoConvergence { iterations, residual: err / area });
            }
        }
        iterations += 1;
    }
    let residual = diagram.areas.iter().zip(&cloud.masses).map(|(a, m)| (a - m).abs()).fold(0.0, f64::max) / area;
    let potential = PLConvexPotential::from_weights(&cloud.points, &w.0, u1.clone());
    Ok(Solution { source: u1.clone(), cloud: cloud.clone(), weights: w, potential, diagram, iterations, residual, history, init })
}

impl Solution {
    /// Rebuilds a solution from stored weights (no iterations performed).
    pub fn from_weights(source: Polygon, cloud: TargetCloud, weights: DualWeights, iterations: usize) -> Result<Self> {
        let diagram = power_diagram(&source, &cloud, &weights)?;
        let area = source.area();
        let residual = diagram.areas.iter().zip(&cloud.masses).map(|(a, m)| (a - m).abs()).fold(0.0, f64::max) / area;
        let potential = PLConvexPotential::from_weights(&cloud.points, &weights.0, source.clone());
        Ok(Solution { source, cloud, weights, potential, diagram, iterations, residual, history: vec![residual], init: InitStrategy::Voronoi })
    }

    /// The discrete transport map `x ↦ ∇ψ(x)`.
    pub fn map(&self, x: Vec2d) -> Vec2d {
        self.potential.slope(x)
    }

    /// Mean linear size of a cell, `√(area(U₁)/n)`.
    pub fn cell_size(&self) -> f64 {
        (self.source.area() / self.cloud.len() as f64).sqrt()
    }

    /// `Σᵢ ∫_{cellᵢ} ½‖x − yᵢ‖² dx`.
    pub fn transport_cost(&self) -> f64 {
        self.diagram
            .cells
            .iter()
            .zip(&self.cloud.points)
            .filter_map(|(c, &y)| c.as_ref().map(|c| (c.moments(), y)))
            .map(|(m, y)| 0.5 * m.area * ((m.centroid - y).norm_sq() + m.covariance.trace()))
            .sum()
    }
}
