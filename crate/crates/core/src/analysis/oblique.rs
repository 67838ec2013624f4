use serde::{Deserialize, Serialize};

use super::field::IndexedPotential;
use crate::error::{Error, Result};
use crate::geometry::{angle, left_tangent, right_tangent, BoundaryLocation};
use crate::{Polygon, Vec2d};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObliquenessSample {
    pub x0: Vec2d,
    /// Boundary image reached from the clockwise side of `x₀`.
    pub y_cw: Vec2d,
    /// Boundary image reached from the counter-clockwise side of `x₀`.
    pub y_ccw: Vec2d,
    pub left: Vec2d,
    pub right: Vec2d,
    pub left_dual: Vec2d,
    pub right_dual: Vec2d,
    pub l_dot: f64,
    pub r_dot: f64,
    pub angle_l: f64,
    pub angle_r: f64,
    pub margin: f64,
    /// Longest ray followed from a target point to `∂U₂`.
    pub ray_length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObliquenessOptions {
    /// Rays longer than this many target cell sizes flag an under-resolved boundary.
    pub max_ray_cells: f64,
}

impl Default for ObliquenessOptions {
    fn default() -> Self {
        ObliquenessOptions { max_ray_cells: 8.0 }
    }
}

/// Compares the tangent rays of `U₁` at `x₀` with those of `U₂` at the
/// boundary image of `x₀`.
///
/// The subdifferential of the discrete potential at a boundary point is
/// unbounded in the outward normal directions; its extreme slopes on each
/// side of `x₀` are where the rays from the adjacent target points along the
/// outward normals of the incident edges leave `U₂`. The clockwise image is
/// paired with the left tangent and the counter-clockwise image with the right.
pub fn obliqueness_check(psi: &IndexedPotential, u2: &Polygon, x0: Vec2d, opts: &ObliquenessOptions) -> Result<ObliquenessSample> {
    let u1 = psi.domain();
    let (e_in, e_out) = match u1.locate_boundary(x0)? {
        BoundaryLocation::Vertex(i) => (i + u1.len() - 1, i),
        BoundaryLocation::Edge(i) => (i, i),
    };
    let left = left_tangent(u1, x0)?.direction;
    let right = right_tangent(u1, x0)?.direction;
    let eps = 1e-6 * psi.cell_size();
    let a = psi.argmax(x0 + left * eps).0;
    let b = psi.argmax(x0 + right * eps).0;
    let n = psi.potential.len() as f64;
    let max_ray = opts.max_ray_cells * (u2.area() / n).sqrt();

    let exit = |i: usize, normal: Vec2d| -> Result<(Vec2d, f64)> {
        let y = psi.potential.pieces[i].slope;
        u2.ray_exit(y, normal).ok_or_else(|| Error::InvalidInput("ray does not leave the target".into()))
    };
    let (y_cw, la) = exit(a, u1.edge_normal(e_in))?;
    let (y_ccw, lb) = exit(b, u1.edge_normal(e_out))?;
    let ray_length = la.max(lb);
    if ray_length > max_ray {
        return Err(Error::UnderResolved { distance: ray_length, tol: max_ray });
    }
    let left_dual = left_tangent(u2, y_cw)?.direction;
    let right_dual = right_tangent(u2, y_ccw)?.direction;
    let l_dot = left.dot(left_dual);
    let r_dot = right.dot(right_dual);
    Ok(ObliquenessSample {
        x0,
        y_cw,
        y_ccw,
        left,
        right,
        left_dual,
        right_dual,
        l_dot,
        r_dot,
        angle_l: angle(left, left_dual)?,
        angle_r: angle(right, right_dual)?,
        margin: l_dot.min(r_dot),
        ray_length,
    })
}
