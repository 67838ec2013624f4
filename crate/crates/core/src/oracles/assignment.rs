use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec2d;

pub const MAX_ASSIGNMENT: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Source `i` is sent to target `permutation[i]`.
    pub permutation: Vec<usize>,
    /// `Σᵢ m ½‖xᵢ − y_σ(i)‖²` with the common mass `m`.
    pub cost: f64,
}

/// Optimal assignment between equal-mass point sets under `½‖x − y‖²`
/// (shortest augmenting path Hungarian method, O(n³)).
pub fn exact_assignment(sources: &[(Vec2d, f64)], targets: &[(Vec2d, f64)]) -> Result<Assignment> {
    let n = sources.len();
    if n != targets.len() {
        return Err(Error::InvalidInput("source and target counts differ".into()));
    }
    if n > MAX_ASSIGNMENT {
        return Err(Error::SizeExceeded { n, max: MAX_ASSIGNMENT });
    }
    if n == 0 {
        return Ok(Assignment { permutation: Vec::new(), cost: 0.0 });
    }
    let m = sources[0].1;
    if sources.iter().chain(targets).any(|&(_, w)| (w - m).abs() > 1e-12 * m.abs()) {
        return Err(Error::InvalidInput("assignment oracle requires equal masses".into()));
    }
    let cost = |i: usize, j: usize| 0.5 * (sources[i].0 - targets[j].0).norm_sq();

    // 1-based potentials u (rows), v (columns); way[j] = previous column on the path
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut permutation = vec![0; n];
    for j in 1..=n {
        permutation[p[j] - 1] = j - 1;
    }
    let total: f64 = (0..n).map(|i| cost(i, permutation[i])).sum();
    Ok(Assignment { permutation, cost: m * total })
}
