use crate::error::{Error, Result};
use crate::solver::Solution;

/// `|Σ_{i∈Q} νᵢ − Σ_{i∈Q} area(cellᵢ)|` for a union `Q` of cells given by index.
pub fn ma_residual(sol: &Solution, cells: &[usize]) -> Result<f64> {
    if cells.is_empty() {
        return Err(Error::NotCellUnion("empty index set".into()));
    }
    let n = sol.cloud.len();
    let mut seen = vec![false; n];
    let mut mass = 0.0;
    let mut area = 0.0;
    for &i in cells {
        if i >= n {
            return Err(Error::NotCellUnion(format!("cell {i} out of range")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::NotCellUnion(format!("cell {i} repeated")));
        }
        mass += sol.cloud.masses[i];
        area += sol.diagram.areas[i];
    }
    Ok((mass - area).abs())
}
