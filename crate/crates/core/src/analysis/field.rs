use crate::error::Result;
use crate::potential::PLConvexPotential;
use crate::solver::power_cells;
use crate::{Polygon, Potential, Vec2d};

/// A scalar function of the plane that can be probed pointwise.
pub trait ScalarField: Sync {
    fn value(&self, x: Vec2d) -> f64;

    /// Length scale below which the field carries no curvature information.
    fn resolution(&self, _x: Vec2d) -> f64 {
        0.0
    }
}

impl ScalarField for Potential {
    fn value(&self, x: Vec2d) -> f64 {
        PLConvexPotential::value(self, x)
    }
}

/// Uniform bucket grid mapping points to the cells that may contain them.
struct Locator {
    lo: Vec2d,
    inv: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    fn new(lo: Vec2d, hi: Vec2d, cells: &[Option<Polygon>]) -> Self {
        let count = cells.iter().filter(|c| c.is_some()).count().max(1);
        let span = hi - lo;
        let h = (span.x * span.y / count as f64).sqrt().max(f64::MIN_POSITIVE);
        let nx = ((span.x / h).ceil() as usize).clamp(1, 4096);
        let ny = ((span.y / h).ceil() as usize).clamp(1, 4096);
        let inv = (nx as f64 / span.x).min(ny as f64 / span.y);
        let mut loc = Locator { lo, inv, nx, ny, buckets: vec![Vec::new(); nx * ny] };
        for (i, c) in cells.iter().enumerate() {
            if let Some(c) = c {
                let (a, b) = c.bounds();
                let (i0, j0) = loc.bucket(a);
                let (i1, j1) = loc.bucket(b);
                for j in j0..=j1 {
                    for k in i0..=i1 {
                        loc.buckets[j * nx + k].push(i as u32);
                    }
                }
            }
        }
        loc
    }

    fn bucket(&self, p: Vec2d) -> (usize, usize) {
        let fx = ((p.x - self.lo.x) * self.inv).floor().max(0.0) as usize;
        let fy = ((p.y - self.lo.y) * self.inv).floor().max(0.0) as usize;
        (fx.min(self.nx - 1), fy.min(self.ny - 1))
    }

    fn candidates(&self, p: Vec2d) -> &[u32] {
        let (i, j) = self.bucket(p);
        &self.buckets[j * self.nx + i]
    }
}

/// A PL convex potential with its cell complex precomputed for fast
/// evaluation and exact sublevel-set queries.
pub struct IndexedPotential {
    pub potential: Potential,
    /// Evaluation box: the domain's bounding box doubled about its centre.
    pub bbox: Polygon,
    /// Cells of the full power diagram clipped to `bbox`.
    pub cells: Vec<Option<Polygon>>,
    /// Cells clipped to the domain.
    pub domain_cells: Vec<Option<Polygon>>,
    pub domain_areas: Vec<f64>,
    locator: Locator,
    mean_cell: f64,
}

impl IndexedPotential {
    pub fn new(potential: Potential) -> Result<Self> {
        let (lo, hi) = potential.domain.bounds();
        let c = (lo + hi) * 0.5;
        let half = hi - c;
        let bbox = Polygon::rectangle(c - half * 2.0, c + half * 2.0)?;
        let slopes: Vec<Vec2d> = potential.pieces.iter().map(|p| p.slope).collect();
        let heights: Vec<f64> = potential.pieces.iter().map(|p| p.intercept).collect();
        let full = power_cells(&bbox, &slopes, &heights)?;
        let dom = power_cells(&potential.domain, &slopes, &heights)?;
        let (blo, bhi) = bbox.bounds();
        let locator = Locator::new(blo, bhi, &full.cells);
        let active = dom.nonempty().max(1);
        let mean_cell = (potential.domain.area() / active as f64).sqrt();
        Ok(IndexedPotential { potential, bbox, cells: full.cells, domain_cells: dom.cells, domain_areas: dom.areas, locator, mean_cell })
    }

    pub fn domain(&self) -> &Polygon {
        &self.potential.domain
    }

    fn in_box(&self, x: Vec2d) -> bool {
        let (lo, hi) = self.bbox.bounds();
        x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y
    }

    /// Index and value of a maximizing piece.
    pub fn argmax(&self, x: Vec2d) -> (usize, f64) {
        if !self.in_box(x) {
            return self.potential.argmax(x);
        }
        let cand = self.locator.candidates(x);
        if cand.is_empty() {
            return self.potential.argmax(x);
        }
        let mut best = (cand[0] as usize, self.potential.pieces[cand[0] as usize].eval(x));
        for &i in &cand[1..] {
            let v = self.potential.pieces[i as usize].eval(x);
            if v > best.1 || (v == best.1 && (i as usize) < best.0) {
                best = (i as usize, v);
            }
        }
        best
    }

    pub fn slope(&self, x: Vec2d) -> Vec2d {
        self.potential.pieces[self.argmax(x).0].slope
    }

    /// Mean cell size `√(area(domain)/#cells)`.
    pub fn cell_size(&self) -> f64 {
        self.mean_cell
    }

    /// Linear size of the domain cell containing `x`.
    pub fn local_cell_size(&self, x: Vec2d) -> f64 {
        let (i, _) = self.argmax(x);
        let a = self.domain_areas[i];
        if a > 0.0 {
            a.sqrt()
        } else {
            self.mean_cell
        }
    }

    /// Number of pieces with a nonempty cell in the domain.
    pub fn active_pieces(&self) -> usize {
        self.domain_cells.iter().filter(|c| c.is_some()).count()
    }
}

impl ScalarField for IndexedPotential {
    fn value(&self, x: Vec2d) -> f64 {
        self.argmax(x).1
    }

    fn resolution(&self, x: Vec2d) -> f64 {
        self.local_cell_size(x)
    }
}
