use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::triangulation::RegularTriangulation;
use crate::error::{Error, Result};
use crate::{Polygon, Vec2d};

/// Two cells sharing a boundary segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adjacency {
    pub i: usize,
    pub j: usize,
    /// Length of the shared segment.
    pub length: f64,
    /// `‖yᵢ − yⱼ‖`.
    pub distance: f64,
}

/// Restriction of a power diagram to a convex domain.
#[derive(Clone, Debug)]
pub struct PowerDiagram {
    pub cells: Vec<Option<Polygon>>,
    pub areas: Vec<f64>,
    pub adjacency: Vec<Adjacency>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Label {
    Boundary,
    Site(u32),
}

fn clip_labeled(poly: &[(Vec2d, Label)], n: Vec2d, c: f64, label: Label, out: &mut Vec<(Vec2d, Label)>) {
    out.clear();
    let k = poly.len();
    for i in 0..k {
        let (p, lp) = poly[i];
        let q = poly[(i + 1) % k].0;
        let dp = n.dot(p) - c;
        let dq = n.dot(q) - c;
        if dp <= 0.0 {
            out.push((p, lp));
            if dq > 0.0 && dp < 0.0 {
                out.push((p + (q - p) * (dp / (dp - dq)), label));
            } else if dq > 0.0 {
                // p lies on the line: the edge leaving p is replaced by the clip line
                out.last_mut().unwrap().1 = label;
            }
        } else if dq < 0.0 {
            out.push((p + (q - p) * (dp / (dp - dq)), lp));
        }
    }
}

fn signed_area(v: &[(Vec2d, Label)]) -> f64 {
    let o = v[0].0;
    let mut s = 0.0;
    for i in 1..v.len().saturating_sub(1) {
        s += (v[i].0 - o).cross(v[i + 1].0 - o);
    }
    0.5 * s
}

/// Rejects exactly repeated sites.
pub(crate) fn check_distinct(points: &[Vec2d]) -> Result<()> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)).then(a.cmp(&b)));
    for w in idx.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::DuplicatePoints(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    Ok(())
}

/// Neighbour candidates of each site: triangulation edges, or all pairs when
/// the lifted configuration has no 2-D hull.
pub(crate) fn site_neighbors(points: &[Vec2d], heights: &[f64], seed: u64) -> Result<Vec<Vec<u32>>> {
    let raw: Vec<[f64; 2]> = points.iter().map(|p| [p.x, p.y]).collect();
    match RegularTriangulation::build(&raw, heights, seed)? {
        Some(t) => Ok(t.neighbors()),
        None => {
            let n = points.len() as u32;
            Ok((0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect())
        }
    }
}

type CellBoundary = Vec<(Vec2d, Label)>;

/// Cells `{x ∈ domain : x·yᵢ − hᵢ ≥ x·yⱼ − hⱼ ∀j}` of the potential `max(x·yᵢ − hᵢ)`.
pub(crate) fn power_cells(domain: &Polygon, points: &[Vec2d], heights: &[f64]) -> Result<PowerDiagram> {
    check_distinct(points)?;
    let nbrs = site_neighbors(points, heights, 0x5eed)?;
    let base: Vec<(Vec2d, Label)> = domain.vertices().iter().map(|&v| (v, Label::Boundary)).collect();

    let per_cell: Vec<(Option<CellBoundary>, f64)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            if nbrs[i].is_empty() && points.len() > 1 {
                return (None, 0.0);
            }
            let mut cur = base.clone();
            let mut buf = Vec::with_capacity(base.len() + nbrs[i].len());
            for &j in &nbrs[i] {
                let j = j as usize;
                let n = points[j] - points[i];
                clip_labeled(&cur, n, heights[j] - heights[i], Label::Site(j as u32), &mut buf);
                std::mem::swap(&mut cur, &mut buf);
                if cur.len() < 3 {
                    return (None, 0.0);
                }
            }
            let a = signed_area(&cur);
            if a > 0.0 {
                (Some(cur), a)
            } else {
                (None, 0.0)
            }
        })
        .collect();

    let mut lengths: Vec<Vec<(u32, f64)>> = vec![Vec::new(); points.len()];
    for (i, (cell, _)) in per_cell.iter().enumerate() {
        if let Some(c) = cell {
            for k in 0..c.len() {
                if let Label::Site(j) = c[k].1 {
                    let l = c[k].0.dist(c[(k + 1) % c.len()].0);
                    match lengths[i].iter_mut().find(|e| e.0 == j) {
                        Some(e) => e.1 += l,
                        None => lengths[i].push((j, l)),
                    }
                }
            }
        }
    }
    let mut adjacency = Vec::new();
    for i in 0..points.len() {
        for &(j, lij) in &lengths[i] {
            let j = j as usize;
            if j <= i {
                continue;
            }
            let lji = lengths[j].iter().find(|e| e.0 as usize == i).map_or(0.0, |e| e.1);
            let length = 0.5 * (lij + lji);
            if length > 0.0 {
                adjacency.push(Adjacency { i, j, length, distance: points[i].dist(points[j]) });
            }
        }
    }
    let (cells, areas): (Vec<Option<Polygon>>, Vec<f64>) = per_cell
        .into_iter()
        .map(|(c, a)| match c {
            Some(c) => {
                let poly = Polygon::from_ccw_unchecked(c.into_iter().map(|(p, _)| p).collect());
                let area = if poly.is_some() { a } else { 0.0 };
                (poly, area)
            }
            None => (None, 0.0),
        })
        .unzip();
    Ok(PowerDiagram { cells, areas, adjacency })
}

impl PowerDiagram {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn nonempty(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Centroids of the cells, `None` for empty cells.
    pub fn centroids(&self) -> Vec<Option<Vec2d>> {
        self.cells.par_iter().map(|c| c.as_ref().map(|p| p.centroid())).collect()
    }

    /// Whether the cells are connected through shared segments.
    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for a in &self.adjacency {
            adj[a.i].push(a.j);
            adj[a.j].push(a.i);
        }
        let Some(start) = (0..n).find(|&i| self.cells[i].is_some()) else {
            return false;
        };
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.nonempty()
    }

    /// Vertices of all nonempty cells, deduplicated.
    pub fn vertices(&self) -> Vec<Vec2d> {
        let mut all: Vec<Vec2d> = self.cells.iter().flatten().flat_map(|c| c.vertices().iter().copied()).collect();
        let scale = all.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let q = 1e-11 * scale;
        let key = |p: &Vec2d| ((p.x / q).round() as i64, (p.y / q).round() as i64);
        all.sort_by_key(|a| key(a));
        all.dedup_by(|a, b| key(a) == key(b));
        all
    }
}
