//! Semi-discrete transport from a uniform polygon to a weighted point cloud.

mod cloud;
mod dual;
mod io;
mod linalg;
mod newton;
mod power;
pub(crate) mod triangulation;

pub use cloud::{sample_target, sample_target_with, DualWeights, LloydInit, TargetCloud, LLOYD_ITERATIONS};
pub use dual::legendre_dual;
pub use io::SolutionFile;
pub use newton::{newton_solve, power_diagram, InitStrategy, Solution, SolverOptions};
pub(crate) use power::power_cells;
pub use power::{Adjacency, PowerDiagram};
