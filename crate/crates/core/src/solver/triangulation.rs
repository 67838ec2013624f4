//! Incremental regular triangulation: the lower convex hull of lifted points
//! `(yᵢ, hᵢ)`, with a vertex at infinity closing the hull into a sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::error::{Error, Result};

const INF: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [u32; 3],
    // n[k] is the triangle across the edge opposite v[k]
    n: [u32; 3],
}

impl Tri {
    fn is_infinite(&self) -> bool {
        self.v.contains(&INF)
    }

    /// Finite edge `(a, b)` of an infinite triangle, oriented with the outside on its left.
    fn hull_edge(&self) -> (u32, u32) {
        match self.v.iter().position(|&v| v == INF) {
            Some(0) => (self.v[1], self.v[2]),
            Some(1) => (self.v[2], self.v[0]),
            _ => (self.v[0], self.v[1]),
        }
    }
}

pub(crate) struct RegularTriangulation<'a> {
    pts: &'a [[f64; 2]],
    heights: &'a [f64],
    tris: Vec<Tri>,
    alive: Vec<bool>,
    free: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
    last: u32,
    rng: ChaCha8Rng,
}

fn c2(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Position along the Hilbert curve of order 16 for coordinates in `[0, 2¹⁶)`.
fn hilbert_key(mut x: u32, mut y: u32) -> u64 {
    let n: u32 = 1 << 16;
    let mut d: u64 = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

pub(crate) fn hilbert_order(pts: &[[f64; 2]]) -> Vec<usize> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = 65535.0 / span;
    let mut keyed: Vec<(u64, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = ((p[0] - lo[0]) * scale) as u32;
            let y = ((p[1] - lo[1]) * scale) as u32;
            (hilbert_key(x.min(65535), y.min(65535)), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

impl<'a> RegularTriangulation<'a> {
    /// Returns `None` when all points are collinear.
    pub(crate) fn build(pts: &'a [[f64; 2]], heights: &'a [f64], seed: u64) -> Result<Option<Self>> {
        assert_eq!(pts.len(), heights.len());
        let n = pts.len();
        if n < 3 {
            return Ok(None);
        }
        let order = hilbert_order(pts);
        let (a, b) = (order[0], order[1]);
        let Some(k) = (2..n).find(|&k| orient2d(c2(pts[a]), c2(pts[b]), c2(pts[order[k]])) != 0.0) else {
            return Ok(None);
        };
        let c = order[k];
        let mut t = RegularTriangulation {
            pts,
            heights,
            tris: Vec::with_capacity(2 * n + 8),
            alive: Vec::with_capacity(2 * n + 8),
            free: Vec::new(),
            mark: Vec::with_capacity(2 * n + 8),
            stamp: 0,
            last: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        let (a, b, c) = if orient2d(c2(pts[a]), c2(pts[b]), c2(pts[c])) > 0.0 { (a as u32, b as u32, c as u32) } else { (b as u32, a as u32, c as u32) };
        let init = [[a, b, c], [b, a, INF], [c, b, INF], [a, c, INF]];
        for v in init {
            t.tris.push(Tri { v, n: [INF; 3] });
            t.alive.push(true);
            t.mark.push(0);
        }
        for i in 0..4 {
            for k in 0..3 {
                let (u, w) = (t.tris[i].v[(k + 1) % 3], t.tris[i].v[(k + 2) % 3]);
                let j = (0..4).find(|&j| j != i && t.tri_has_edge(j as u32, w, u)).expect("closed initial sphere");
                t.tris[i].n[k] = j as u32;
            }
        }
        for (idx, &p) in order.iter().enumerate() {
            if idx == 0 || idx == 1 || idx == k {
                continue;
            }
            t.insert(p as u32)?;
        }
        Ok(Some(t))
    }

    fn tri_has_edge(&self, t: u32, a: u32, b: u32) -> bool {
        let v = self.tris[t as usize].v;
        (0..3).any(|k| v[k] == a && v[(k + 1) % 3] == b)
    }

    fn lift(&self, i: u32) -> Coord3D<f64> {
        let p = self.pts[i as usize];
        Coord3D { x: p[0], y: p[1], z: self.heights[i as usize] }
    }

    fn in_conflict(&self, t: u32, p: u32) -> bool {
        let tri = &self.tris[t as usize];
        if !tri.is_infinite() {
            let [a, b, c] = tri.v;
            return orient3d(self.lift(a), self.lift(b), self.lift(c), self.lift(p)) > 0.0;
        }
        let (a, b) = tri.hull_edge();
        let (pa, pb, pp) = (self.pts[a as usize], self.pts[b as usize], self.pts[p as usize]);
        let o = orient2d(c2(pa), c2(pb), c2(pp));
        if o != 0.0 {
            return o > 0.0;
        }
        // on the hull line: conflict only strictly inside the segment and below it
        let axis = if (pb[0] - pa[0]).abs() >= (pb[1] - pa[1]).abs() { 0 } else { 1 };
        let (mut sa, mut ha, mut sb, mut hb) = (pa[axis], self.heights[a as usize], pb[axis], self.heights[b as usize]);
        if sa > sb {
            std::mem::swap(&mut sa, &mut sb);
            std::mem::swap(&mut ha, &mut hb);
        }
        let sp = pp[axis];
        if !(sp > sa && sp < sb) {
            return false;
        }
        orient2d(Coord { x: sa, y: ha }, Coord { x: sb, y: hb }, Coord { x: sp, y: self.heights[p as usize] }) < 0.0
    }

    fn locate(&mut self, p: u32) -> u32 {
        let pp = c2(self.pts[p as usize]);
        let mut t = self.last;
        if !self.alive[t as usize] {
            t = self.alive.iter().position(|&a| a).expect("triangulation is nonempty") as u32;
        }
        if self.tris[t as usize].is_infinite() {
            let tri = self.tris[t as usize];
            let k = tri.v.iter().position(|&v| v == INF).unwrap();
            t = tri.n[k];
        }
        loop {
            let tri = self.tris[t as usize];
            if tri.is_infinite() {
                return t;
            }
            let off = self.rng.gen_range(0..3);
            let mut moved = false;
            for j in 0..3 {
                let k = (off + j) % 3;
                let (a, b) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                if orient2d(c2(self.pts[a as usize]), c2(self.pts[b as usize]), pp) < 0.0 {
                    t = tri.n[k];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return t;
            }
        }
    }

    fn insert(&mut self, p: u32) -> Result<()> {
        let start = self.locate(p);
        if !self.in_conflict(start, p) {
            // on or above the lower hull: the point's cell is empty
            return Ok(());
        }
        self.stamp += 1;
        let stamp = self.stamp;
        let mut region = vec![start];
        let mut stack = vec![start];
        self.mark[start as usize] = stamp;
        // (e0, e1, outside triangle, inside triangle)
        let mut boundary: Vec<(u32, u32, u32, u32)> = Vec::new();
        while let Some(t) = stack.pop() {
            let tri = self.tris[t as usize];
            for k in 0..3 {
                let nb = tri.n[k];
                if self.mark[nb as usize] == stamp {
                    continue;
                }
                if self.in_conflict(nb, p) {
                    self.mark[nb as usize] = stamp;
                    region.push(nb);
                    stack.push(nb);
                } else {
                    boundary.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb, t));
                }
            }
        }
        for &t in &region {
            self.alive[t as usize] = false;
            self.free.push(t);
        }
        let first_new = boundary.len();
        let mut created: Vec<u32> = Vec::with_capacity(first_new);
        for &(e0, e1, out, inside) in &boundary {
            if e0 != INF && e1 != INF {
                let (a, b, q) = (self.pts[e0 as usize], self.pts[e1 as usize], self.pts[p as usize]);
                if orient2d(c2(a), c2(b), c2(q)) <= 0.0 {
                    return Err(Error::InvalidInput("degenerate point configuration in power diagram".into()));
                }
            }
            let tri = Tri { v: [e0, e1, p], n: [INF, INF, out] };
            let id = match self.free.pop() {
                Some(id) => {
                    self.tris[id as usize] = tri;
                    self.alive[id as usize] = true;
                    id
                }
                None => {
                    self.tris.push(tri);
                    self.alive.push(true);
                    self.mark.push(0);
                    (self.tris.len() - 1) as u32
                }
            };
            let o = &mut self.tris[out as usize];
            let k = (0..3).find(|&k| o.n[k] == inside && o.v[(k + 1) % 3] == e1 && o.v[(k + 2) % 3] == e0).expect("outside neighbour shares the boundary edge");
            o.n[k] = id;
            created.push(id);
        }
        for (i, &(e0, e1, _, _)) in boundary.iter().enumerate() {
            let next = boundary.iter().position(|b| b.0 == e1).expect("boundary is a closed loop");
            let prev = boundary.iter().position(|b| b.1 == e0).expect("boundary is a closed loop");
            let t = &mut self.tris[created[i] as usize];
            t.n[0] = created[next];
            t.n[1] = created[prev];
        }
        self.last = created[0];
        Ok(())
    }

    /// Sorted neighbour lists over finite edges; hidden points get empty lists.
    pub(crate) fn neighbors(&self) -> Vec<Vec<u32>> {
        let mut nb: Vec<Vec<u32>> = vec![Vec::new(); self.pts.len()];
        for (t, tri) in self.tris.iter().enumerate() {
            if !self.alive[t] {
                continue;
            }
            for k in 0..3 {
                let (u, v) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                if u != INF && v != INF && u < v {
                    nb[u as usize].push(v);
                    nb[v as usize].push(u);
                }
            }
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    #[cfg(test)]
    fn check(&self) {
        for (t, tri) in self.tris.iter().enumerate() {
            if !self.alive[t] {
                continue;
            }
            for k in 0..3 {
                let nb = tri.n[k] as usize;
                assert!(self.alive[nb], "dangling neighbour");
                let (u, v) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                assert!(self.tri_has_edge(nb as u32, v, u), "neighbour does not share edge");
            }
            if !tri.is_infinite() {
                let [a, b, c] = tri.v;
                assert!(orient2d(c2(self.pts[a as usize]), c2(self.pts[b as usize]), c2(self.pts[c as usize])) > 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_points(n: usize, seed: u64) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect()
    }

    #[test]
    fn delaunay_property() {
        let pts = random_points(400, 7);
        let h: Vec<f64> = pts.iter().map(|p| 0.5 * (p[0] * p[0] + p[1] * p[1])).collect();
        let t = RegularTriangulation::build(&pts, &h, 1).unwrap().unwrap();
        t.check();
        // empty circumcircles
        for (i, tri) in t.tris.iter().enumerate() {
            if !t.alive[i] || tri.is_infinite() {
                continue;
            }
            for q in 0..pts.len() as u32 {
                if tri.v.contains(&q) {
                    continue;
                }
                assert!(!t.in_conflict(i as u32, q));
            }
        }
        assert!(t.neighbors().iter().all(|l| !l.is_empty()));
    }

    #[test]
    fn hidden_points_have_no_neighbors() {
        let mut pts = random_points(100, 3);
        let mut h: Vec<f64> = pts.iter().map(|p| 0.5 * (p[0] * p[0] + p[1] * p[1])).collect();
        // lift one interior point far up
        pts.push([0.5, 0.5]);
        h.push(10.0);
        let t = RegularTriangulation::build(&pts, &h, 1).unwrap().unwrap();
        t.check();
        assert!(t.neighbors()[100].is_empty());
    }

    #[test]
    fn grid_with_cocircular_points() {
        let mut pts = Vec::new();
        for i in 0..12 {
            for j in 0..12 {
                pts.push([i as f64, j as f64]);
            }
        }
        let h: Vec<f64> = pts.iter().map(|p| 0.5 * (p[0] * p[0] + p[1] * p[1])).collect();
        let t = RegularTriangulation::build(&pts, &h, 5).unwrap().unwrap();
        t.check();
        let nb = t.neighbors();
        // every grid point is adjacent to its 4-neighbours
        for i in 0..12u32 {
            for j in 0..11u32 {
                assert!(nb[(i * 12 + j) as usize].contains(&(i * 12 + j + 1)));
            }
        }
    }

    #[test]
    fn collinear_input() {
        let pts: Vec<[f64; 2]> = (0..5).map(|i| [i as f64, 2.0 * i as f64]).collect();
        let h = vec![0.0; 5];
        assert!(RegularTriangulation::build(&pts, &h, 0).unwrap().is_none());
    }
}
