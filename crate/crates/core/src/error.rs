use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("zero-length vector")]
    ZeroVector,
    #[error("point is not on the polygon boundary (distance {distance:.3e})")]
    NotOnBoundary { distance: f64 },
    #[error("singular linear map")]
    Singular,
    #[error("map is not unimodular (det = {0})")]
    NotUnimodular(f64),
    #[error("duplicate target points {0} and {1}")]
    DuplicatePoints(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate domain: eccentricity {0:.3e} exceeds limit")]
    DegenerateDomain(f64),
    #[error("power diagram is disconnected at initialization")]
    Disconnected,
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("empty section")]
    EmptySection,
    #[error("centring did not converge after {iterations} iterations (residual {residual:.3e})")]
    CentringFailed { iterations: usize, residual: f64 },
    #[error("radius {radius:.3e} below resolution floor {floor:.3e}")]
    BelowResolution { radius: f64, floor: f64 },
    #[error("disk is not contained in the domain")]
    DiskNotContained,
    #[error("boundary image under-resolved (ray length {distance:.3e} > {tol:.3e})")]
    UnderResolved { distance: f64, tol: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("problem size {n} exceeds limit {max}")]
    SizeExceeded { n: usize, max: usize },
    #[error("region is not a union of cells: {0}")]
    NotCellUnion(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
