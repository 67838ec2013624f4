//! Experiment configuration. One config file describes one run: a source and
//! target domain, a discretization, one experiment and its thresholds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use otreg_core::solver::{LloydInit, SolverOptions, LLOYD_ITERATIONS};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub source: DomainSpec,
    pub target: DomainSpec,
    pub n_targets: usize,
    /// Seed for target sampling and any randomized analysis step.
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    pub experiment: Experiment,
    /// Check name → threshold. Each experiment accepts a fixed set of names.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
}

/// Domain generators. All of them except `vertices` produce unit area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Centred regular polygon with an edge parallel to the x-axis.
    Regular { sides: usize },
    /// Convex hull of seeded uniform points in the unit square, centred at its centroid.
    RandomHull { points: usize, seed: u64 },
    /// `[0, √a] × [0, 1/√a]`.
    Rectangle { aspect: f64 },
    /// Isosceles triangle with apex at the origin and opening angle `angle_deg`,
    /// one leg along the positive x-axis.
    Wedge { angle_deg: f64 },
    /// The two halves of the critical-corner pair: `[-1,0]×[0,1]` and the
    /// right triangle with legs of length √2 along the negative x- and positive y-axes.
    CornerPair { role: CornerRole },
    /// Explicit vertex list, used as given.
    Vertices { vertices: Vec<[f64; 2]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CornerRole {
    Source,
    Target,
}

/// Applied after the generator, in the order linear, rotation, translation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Transform {
    /// Row-major 2×2 matrix with positive determinant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotate_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Newton stops once every cell mass is within `tol · area(source)`.
    pub tol: f64,
    pub max_iter: usize,
    pub sampling: Sampling,
    pub lloyd_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverConfig { tol: d.tol, max_iter: d.max_iter, sampling: Sampling::Stratified, lloyd_iterations: LLOYD_ITERATIONS }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iter: self.max_iter, ..SolverOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Stratified,
    Grid,
}

impl From<Sampling> for LloydInit {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Stratified => LloydInit::Stratified,
            Sampling::Grid => LloydInit::Grid,
        }
    }
}

/// Base points for pointwise measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct PointSet {
    pub vertices: bool,
    /// Boundary points at arc-length fractions `(k + ½)/arc_samples`.
    pub arc_samples: usize,
    pub centroid: bool,
    pub explicit: Vec<[f64; 2]>,
}

impl Default for PointSet {
    fn default() -> Self {
        PointSet { vertices: true, arc_samples: 8, centroid: true, explicit: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Eccentricity of centred sections against height, with fitted exponents.
    EccentricityGrowth {
        #[serde(default)]
        points: PointSet,
        #[serde(default)]
        heights: HeightRange,
        #[serde(default = "default_bootstrap")]
        bootstrap: usize,
    },
    /// Hessian norms on a mesh against distance to the boundary.
    HessianGrowth {
        #[serde(default)]
        mesh: MeshConfig,
        #[serde(default = "default_bootstrap")]
        bootstrap: usize,
    },
    /// `W^{2,p}` quadrature at `n` and `refine·n` targets.
    W2pTable {
        #[serde(default = "default_p_list")]
        p_list: Vec<f64>,
        #[serde(default)]
        mesh: MeshConfig,
        #[serde(default = "default_refine")]
        refine: usize,
    },
    /// Tangent-ray inner products at equally spaced boundary points.
    ObliquenessScan {
        #[serde(default = "default_boundary_samples")]
        samples: usize,
        #[serde(default = "default_max_ray_cells")]
        max_ray_cells: f64,
    },
    /// Growth of the potential minus its supporting plane along a ray.
    CornerGrowth {
        base: [f64; 2],
        direction: [f64; 2],
        #[serde(default)]
        anchor: Anchor,
        /// Smallest ray parameter, in source cell sizes.
        #[serde(default = "default_s_min_cells")]
        s_min_cells: f64,
        #[serde(default = "default_s_max")]
        s_max: f64,
        #[serde(default = "default_spd")]
        samples_per_decade: usize,
    },
    /// Ratio `η(h/M)/η(h)` over the height range.
    EccentricityStep {
        #[serde(default)]
        points: PointSet,
        #[serde(default)]
        heights: HeightRange,
        #[serde(default = "default_step")]
        m: f64,
        /// When set, the run is repeated at this many times the targets and the
        /// relative change of the largest ratio is reported.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        refine: Option<usize>,
    },
    /// Section volumes over height, `|S ∩ U₁|/h` and `|S|/h`.
    VolumeBounds {
        #[serde(default)]
        points: PointSet,
        #[serde(default)]
        heights: HeightRange,
    },
    /// Largest `s` such that the centred section of height `s·h` at a point of the
    /// `t`-dilated section stays inside its `t̄`-dilation.
    Engulfing {
        #[serde(default = "default_engulf_points")]
        points: PointSet,
        h: f64,
        t: f64,
        t_bar: f64,
        #[serde(default = "default_pairs")]
        pairs_per_point: usize,
    },
    /// Primal sections at boundary points against dual sections at the boundary image.
    DualityEllipse {
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default)]
        heights: HeightRange,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct HeightRange {
    pub h_max: f64,
    pub h_min: f64,
    pub samples_per_decade: usize,
    /// Curves stop once a section meets fewer target cells than this.
    pub min_cells: usize,
}

impl Default for HeightRange {
    fn default() -> Self {
        HeightRange { h_max: 0.1, h_min: 1e-3, samples_per_decade: 8, min_cells: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    /// Mesh spacing of the quadrature grid.
    pub spacing: f64,
    /// Excluded boundary strip, in source cell sizes of the coarsest solve.
    pub collar_cells: f64,
    pub r_max: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { spacing: 0.02, collar_cells: 3.0, r_max: 0.05 }
    }
}

/// Supporting slope used by the corner-growth experiment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Anchor {
    /// The boundary image of the base point, snapped to the nearest target vertex.
    #[default]
    TargetVertex,
    /// The discrete gradient at the base point.
    Slope,
    Point([f64; 2]),
}

fn default_bootstrap() -> usize {
    200
}
fn default_p_list() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 10.0]
}
fn default_refine() -> usize {
    4
}
fn default_boundary_samples() -> usize {
    200
}
fn default_max_ray_cells() -> f64 {
    8.0
}
fn default_s_min_cells() -> f64 {
    3.0
}
fn default_s_max() -> f64 {
    0.5
}
fn default_spd() -> usize {
    8
}
fn default_step() -> f64 {
    8.0
}
fn default_pairs() -> usize {
    20
}
fn default_engulf_points() -> PointSet {
    PointSet { vertices: false, arc_samples: 0, centroid: true, explicit: Vec::new() }
}

/// How a check compares its measured value with the configured threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Above => value > threshold,
        }
    }
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::EccentricityGrowth { .. } => "eccentricity-growth",
            Experiment::HessianGrowth { .. } => "hessian-growth",
            Experiment::W2pTable { .. } => "w2p-table",
            Experiment::ObliquenessScan { .. } => "obliqueness-scan",
            Experiment::CornerGrowth { .. } => "corner-growth",
            Experiment::EccentricityStep { .. } => "eccentricity-step",
            Experiment::VolumeBounds { .. } => "volume-bounds",
            Experiment::Engulfing { .. } => "engulfing",
            Experiment::DualityEllipse { .. } => "duality-ellipse",
        }
    }

    /// Checks this experiment can evaluate, beyond the solver's own mass check.
    pub fn checks(&self) -> &'static [(&'static str, Comparison)] {
        use Comparison::*;
        match self {
            Experiment::EccentricityGrowth { .. } => &[("max_exponent", AtMost), ("max_abs_exponent", AtMost), ("max_ci_upper", AtMost)],
            Experiment::HessianGrowth { .. } => &[("exponent", AtMost), ("ci_upper", AtMost)],
            Experiment::W2pTable { .. } => &[("max_relative_change", AtMost)],
            Experiment::ObliquenessScan { .. } => &[("min_margin", Above), ("weak_form", AtLeast)],
            Experiment::CornerGrowth { .. } => &[("exponent", AtLeast)],
            Experiment::EccentricityStep { .. } => &[("max_ratio", AtMost), ("refinement_change", AtMost)],
            Experiment::VolumeBounds { .. } => &[("max_band_in", AtMost), ("max_band_full", AtMost)],
            Experiment::Engulfing { .. } => &[("min_s_bar", AtLeast)],
            Experiment::DualityEllipse { .. } => &[("max_eta_ratio", AtMost), ("max_axis_angle_deg", AtMost)],
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite")))
    }
}

fn check_heights(h: &HeightRange) -> Result<()> {
    positive("h_min", h.h_min)?;
    if !(h.h_max > h.h_min && h.h_max.is_finite()) {
        return Err(invalid("h_max must exceed h_min"));
    }
    if h.samples_per_decade == 0 {
        return Err(invalid("samples_per_decade must be at least 1"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Semantic checks the schema cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.n_targets == 0 {
            return Err(invalid("n_targets must be at least 1"));
        }
        positive("solver.tol", self.solver.tol)?;
        if self.solver.max_iter == 0 {
            return Err(invalid("solver.max_iter must be at least 1"));
        }
        self.source.build().map_err(|e| invalid(format!("source: {e}")))?;
        self.target.build().map_err(|e| invalid(format!("target: {e}")))?;
        let known = self.experiment.checks();
        for (name, v) in &self.thresholds {
            if name != "mass_residual" && !known.iter().any(|(k, _)| k == name) {
                return Err(invalid(format!("unknown threshold {name:?} for {}", self.experiment.kind())));
            }
            if v.is_nan() {
                return Err(invalid(format!("threshold {name:?} is NaN")));
            }
        }
        match &self.experiment {
            Experiment::EccentricityGrowth { heights, bootstrap, .. } => {
                check_heights(heights)?;
                if *bootstrap == 0 {
                    return Err(invalid("bootstrap needs at least one resample"));
                }
            }
            Experiment::VolumeBounds { heights, .. } | Experiment::DualityEllipse { heights, .. } => check_heights(heights)?,
            Experiment::HessianGrowth { mesh, .. } => positive("mesh.spacing", mesh.spacing)?,
            Experiment::W2pTable { p_list, mesh, refine } => {
                positive("mesh.spacing", mesh.spacing)?;
                if p_list.is_empty() {
                    return Err(invalid("p_list is empty"));
                }
                for &p in p_list {
                    positive("p", p)?;
                }
                if *refine < 2 {
                    return Err(invalid("refine must be at least 2"));
                }
            }
            Experiment::ObliquenessScan { samples, max_ray_cells } => {
                if *samples == 0 {
                    return Err(invalid("samples must be at least 1"));
                }
                positive("max_ray_cells", *max_ray_cells)?;
            }
            Experiment::CornerGrowth { direction, s_min_cells, s_max, .. } => {
                if direction[0] == 0.0 && direction[1] == 0.0 {
                    return Err(invalid("direction must be non-zero"));
                }
                positive("s_min_cells", *s_min_cells)?;
                positive("s_max", *s_max)?;
            }
            Experiment::EccentricityStep { heights, m, refine, .. } => {
                check_heights(heights)?;
                if !(*m > 1.0) {
                    return Err(invalid("m must exceed 1"));
                }
                if matches!(refine, Some(r) if *r < 2) {
                    return Err(invalid("refine must be at least 2"));
                }
            }
            Experiment::Engulfing { h, t, t_bar, .. } => {
                positive("h", *h)?;
                positive("t_bar", *t_bar)?;
                if !(*t >= 0.0 && t < t_bar) {
                    return Err(invalid("need 0 ≤ t < t_bar"));
                }
            }
        }
        Ok(())
    }
}

/// JSON schema of [`ExperimentConfig`], as published in `schema/`.
pub fn schema_json() -> String {
    let schema = schemars::schema_for!(ExperimentConfig);
    serde_json::to_string_pretty(&schema).expect("schema serializes") + "\n"
}
