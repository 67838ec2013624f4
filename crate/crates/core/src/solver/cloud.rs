use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::power::power_cells;
use crate::error::{Error, Result};
use crate::{Polygon, Vec2d};

/// Weighted target points discretizing the uniform measure on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetCloud {
    pub points: Vec<Vec2d>,
    pub masses: Vec<f64>,
    /// The target region the points were drawn from.
    pub domain: Polygon,
}

/// Kantorovich weights `wᵢ`, normalized to `Σwᵢ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualWeights(pub Vec<f64>);

impl DualWeights {
    pub fn zeros(n: usize) -> Self {
        DualWeights(vec![0.0; n])
    }

    /// Shifts the weights to zero mean.
    pub fn gauge_fixed(mut self) -> Self {
        let mean = self.0.iter().sum::<f64>() / self.0.len().max(1) as f64;
        self.0.iter_mut().for_each(|w| *w -= mean);
        self
    }
}

/// How Lloyd iterations are started.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LloydInit {
    /// One jittered point per cell of a √n×√n grid over the bounding box,
    /// topped up by rejection sampling.
    Stratified,
    /// Cell centres of a √n×√n grid (exact for square domains with n = k²).
    Grid,
}

pub const LLOYD_ITERATIONS: usize = 30;

impl TargetCloud {
    pub fn new(points: Vec<Vec2d>, masses: Vec<f64>, domain: Polygon) -> Result<Self> {
        if points.is_empty() || points.len() != masses.len() {
            return Err(Error::InvalidInput("points and masses must be nonempty and of equal length".into()));
        }
        if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidInput("masses must be positive".into()));
        }
        let tol = 1e-12 * domain.diameter();
        if let Some(i) = points.iter().position(|&p| !(domain.depth(p) > tol)) {
            return Err(Error::InvalidInput(format!("target point {i} is not strictly inside the target domain")));
        }
        Ok(TargetCloud { points, masses, domain })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

fn initial_points(u2: &Polygon, n: usize, init: LloydInit, rng: &mut ChaCha8Rng) -> Vec<Vec2d> {
    let (lo, hi) = u2.bounds();
    let span = hi - lo;
    // grid resolution chosen so that about n grid cells fall inside the domain
    let fill = (span.x * span.y / u2.area()).max(1.0);
    let k = match init {
        LloydInit::Grid => (n as f64).sqrt().ceil() as usize,
        LloydInit::Stratified => (n as f64 * fill).sqrt().ceil() as usize,
    }
    .max(1);
    let mut pts = Vec::with_capacity(n);
    for j in 0..k {
        for i in 0..k {
            let (dx, dy) = match init {
                LloydInit::Grid => (0.5, 0.5),
                LloydInit::Stratified => (rng.gen::<f64>(), rng.gen::<f64>()),
            };
            let p = lo + Vec2d::new(span.x * (i as f64 + dx) / k as f64, span.y * (j as f64 + dy) / k as f64);
            if u2.depth(p) > 0.0 {
                pts.push(p);
            }
        }
    }
    if pts.len() > n {
        // keep a seeded random subset, in the original spatial order
        let mut keep = rand::seq::index::sample(rng, pts.len(), n).into_vec();
        keep.sort_unstable();
        pts = keep.into_iter().map(|i| pts[i]).collect();
    }
    while pts.len() < n {
        let p = lo + Vec2d::new(span.x * rng.gen::<f64>(), span.y * rng.gen::<f64>());
        if u2.depth(p) > 0.0 && !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// Quantizes the uniform measure on `u2` with `n` points by Lloyd iterations;
/// every point carries mass `source_area / n`.
pub fn sample_target(u2: &Polygon, n: usize, source_area: f64, seed: u64) -> Result<TargetCloud> {
    sample_target_with(u2, n, source_area, seed, LloydInit::Stratified, LLOYD_ITERATIONS)
}

pub fn sample_target_with(u2: &Polygon, n: usize, source_area: f64, seed: u64, init: LloydInit, iterations: usize) -> Result<TargetCloud> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one target point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = initial_points(u2, n, init, &mut rng);
    for _ in 0..iterations {
        let heights: Vec<f64> = pts.iter().map(|p| 0.5 * p.norm_sq()).collect();
        let diagram = power_cells(u2, &pts, &heights)?;
        let cents = diagram.centroids();
        let mut moved = false;
        for (p, c) in pts.iter_mut().zip(cents) {
            if let Some(c) = c {
                moved |= *p != c;
                *p = c;
            }
        }
        if !moved {
            break;
        }
    }
    let masses = vec![source_area / n as f64; n];
    TargetCloud::new(pts, masses, u2.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::rectangle(Vec2d::new(0.0, 0.0), Vec2d::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn grid_is_lloyd_fixed_point() {
        let c = sample_target_with(&unit_square(), 16, 1.0, 0, LloydInit::Grid, 30).unwrap();
        for p in &c.points {
            let fx = p.x * 4.0 - 0.5;
            let fy = p.y * 4.0 - 0.5;
            assert!((fx - fx.round()).abs() < 1e-12 && (fy - fy.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_is_centroid() {
        let tri = Polygon::new(vec![Vec2d::new(0.0, 0.0), Vec2d::new(3.0, 0.0), Vec2d::new(0.0, 3.0)]).unwrap();
        let c = sample_target(&tri, 1, 2.0, 9).unwrap();
        assert!((c.points[0] - Vec2d::new(1.0, 1.0)).norm() < 1e-12);
        assert_eq!(c.masses, vec![2.0]);
    }

    #[test]
    fn stratified_is_deterministic_and_interior() {
        let a = sample_target(&unit_square(), 50, 1.0, 42).unwrap();
        let b = sample_target(&unit_square(), 50, 1.0, 42).unwrap();
        assert_eq!(a, b);
        assert!((a.total_mass() - 1.0).abs() < 1e-12);
    }
}
