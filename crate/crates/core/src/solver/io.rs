use serde::{Deserialize, Serialize};

use super::cloud::{DualWeights, TargetCloud};
use super::newton::Solution;
use crate::error::Result;
use crate::{Polygon, Vec2d};

/// Serialized form of a solved problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub source_polygon: Polygon,
    pub target_polygon: Polygon,
    pub points: Vec<Vec2d>,
    pub masses: Vec<f64>,
    pub weights: Vec<f64>,
    pub tol_achieved: f64,
    pub iterations: usize,
}

impl From<&Solution> for SolutionFile {
    fn from(s: &Solution) -> Self {
        SolutionFile {
            source_polygon: s.source.clone(),
            target_polygon: s.cloud.domain.clone(),
            points: s.cloud.points.clone(),
            masses: s.cloud.masses.clone(),
            weights: s.weights.0.clone(),
            tol_achieved: s.residual,
            iterations: s.iterations,
        }
    }
}

impl SolutionFile {
    pub fn into_solution(self) -> Result<Solution> {
        let cloud = TargetCloud::new(self.points, self.masses, self.target_polygon)?;
        Solution::from_weights(self.source_polygon, cloud, DualWeights(self.weights), self.iterations)
    }
}
