use serde::{Deserialize, Serialize};

use super::affine::AffineMap;
use super::vec::{Mat2, Vec2};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bounded convex polygon with counter-clockwise vertices.
///
/// Construction canonicalizes the vertex list: orientation is made CCW,
/// near-duplicate vertices are dropped and collinear runs are merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2<T>>", into = "Vec<Vec2<T>>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ConvexPolygon<T: Real> {
    vertices: Vec<Vec2<T>>,
}

impl<T: Real> TryFrom<Vec<Vec2<T>>> for ConvexPolygon<T> {
    type Error = Error;
    fn try_from(v: Vec<Vec2<T>>) -> Result<Self> {
        ConvexPolygon::new(v)
    }
}

impl<T: Real> From<ConvexPolygon<T>> for Vec<Vec2<T>> {
    fn from(p: ConvexPolygon<T>) -> Self {
        p.vertices
    }
}

/// Where a boundary point sits on a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryLocation {
    Vertex(usize),
    /// Relative interior of the edge from vertex `i` to vertex `i + 1`.
    Edge(usize),
}

/// Area, centroid and covariance of the uniform measure on a polygon.
#[derive(Clone, Copy, Debug)]
pub struct Moments<T: Real> {
    pub area: T,
    pub centroid: Vec2<T>,
    pub covariance: Mat2<T>,
}

fn bbox_diag<T: Real>(pts: &[Vec2<T>]) -> T {
    let (lo, hi) = bounds(pts);
    (hi - lo).norm()
}

fn bounds<T: Real>(pts: &[Vec2<T>]) -> (Vec2<T>, Vec2<T>) {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

fn signed_area<T: Real>(v: &[Vec2<T>]) -> T {
    let o = v[0];
    let mut s = T::zero();
    for i in 1..v.len().saturating_sub(1) {
        s = s + (v[i] - o).cross(v[i + 1] - o);
    }
    s / T::lit(2.0)
}

impl<T: Real> ConvexPolygon<T> {
    pub fn new(vertices: Vec<Vec2<T>>) -> Result<Self> {
        Self::with_tolerance(vertices, T::lit(T::GEOM_TOL))
    }

    /// Like [`ConvexPolygon::new`] with an explicit relative tolerance.
    pub fn with_tolerance(mut v: Vec<Vec2<T>>, rel_tol: T) -> Result<Self> {
        if v.len() < 3 {
            return Err(Error::DegeneratePolygon(format!("{} vertices", v.len())));
        }
        if v.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegeneratePolygon("non-finite vertex".into()));
        }
        let diam = bbox_diag(&v);
        let area = signed_area(&v);
        if !(area.abs() > rel_tol * diam * diam) {
            return Err(Error::DegeneratePolygon("zero area".into()));
        }
        if area < T::zero() {
            v.reverse();
        }
        let dup_tol = rel_tol * diam;
        let collinear_tol = T::lit(1e-12).max(rel_tol * rel_tol) * diam * diam;
        let mut changed = true;
        while changed && v.len() >= 3 {
            changed = false;
            let n = v.len();
            let mut keep = Vec::with_capacity(n);
            for i in 0..n {
                let prev = v[(i + n - 1) % n];
                let cur = v[i];
                let next = v[(i + 1) % n];
                if cur.dist(next) <= dup_tol {
                    changed = true;
                    continue;
                }
                let (e0, e1) = (cur - prev, next - cur);
                let cr = e0.cross(e1);
                if cr.abs() <= collinear_tol.max(rel_tol * e0.norm() * e1.norm()) && e0.dot(e1) > T::zero() {
                    changed = true;
                    continue;
                }
                keep.push(cur);
            }
            v = keep;
        }
        if v.len() < 3 {
            return Err(Error::DegeneratePolygon("collapsed after canonicalization".into()));
        }
        let n = v.len();
        let mut turning = T::zero();
        for i in 0..n {
            let e0 = v[i] - v[(i + n - 1) % n];
            let e1 = v[(i + 1) % n] - v[i];
            let cr = e0.cross(e1);
            if cr < -rel_tol * e0.norm() * e1.norm() {
                return Err(Error::DegeneratePolygon("not convex".into()));
            }
            turning = turning + cr.atan2(e0.dot(e1));
        }
        if (turning - T::TAU()).abs() > T::lit(1e-6) {
            return Err(Error::DegeneratePolygon("self-intersecting".into()));
        }
        Ok(ConvexPolygon { vertices: v })
    }

    /// Trusts the caller that `v` is convex and CCW; only drops near-duplicates.
    pub(crate) fn from_ccw_unchecked(v: Vec<Vec2<T>>) -> Option<Self> {
        if v.len() < 3 {
            return None;
        }
        let tol = bbox_diag(&v) * T::lit(1e-14);
        let mut out: Vec<Vec2<T>> = Vec::with_capacity(v.len());
        for p in v {
            if out.last().is_none_or(|q| q.dist(p) > tol) {
                out.push(p);
            }
        }
        while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= tol {
            out.pop();
        }
        if out.len() < 3 || !(signed_area(&out) > T::zero()) {
            return None;
        }
        Some(ConvexPolygon { vertices: out })
    }

    /// Convex hull of a point set (monotone chain).
    pub fn hull(points: &[Vec2<T>]) -> Result<Self> {
        let mut pts: Vec<Vec2<T>> = points.to_vec();
        pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than 3 distinct points".into()));
        }
        let mut h: Vec<Vec2<T>> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = h.len();
            let iter: Box<dyn Iterator<Item = &Vec2<T>>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
            for &p in iter {
                while h.len() >= start + 2 {
                    let a = h[h.len() - 2];
                    let b = h[h.len() - 1];
                    if (b - a).cross(p - a) <= T::zero() {
                        h.pop();
                    } else {
                        break;
                    }
                }
                h.push(p);
            }
            h.pop();
        }
        ConvexPolygon::new(h)
    }

    /// Axis-aligned rectangle `[lo.x, hi.x] × [lo.y, hi.y]`.
    pub fn rectangle(lo: Vec2<T>, hi: Vec2<T>) -> Result<Self> {
        ConvexPolygon::new(vec![lo, Vec2::new(hi.x, lo.y), hi, Vec2::new(lo.x, hi.y)])
    }

    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2<T> {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Vec2<T>, Vec2<T>) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> T {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                a.dist(b)
            })
            .sum()
    }

    pub fn centroid(&self) -> Vec2<T> {
        self.moments().centroid
    }

    pub fn moments(&self) -> Moments<T> {
        let v = &self.vertices;
        let o = v[0];
        let (mut a, mut sx, mut sy) = (T::zero(), T::zero(), T::zero());
        let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
        for i in 1..v.len() - 1 {
            let p = v[i] - o;
            let q = v[i + 1] - o;
            let cr = p.cross(q);
            a = a + cr;
            sx = sx + cr * (p.x + q.x);
            sy = sy + cr * (p.y + q.y);
            sxx = sxx + cr * (p.x * p.x + p.x * q.x + q.x * q.x);
            syy = syy + cr * (p.y * p.y + p.y * q.y + q.y * q.y);
            sxy = sxy + cr * (p.x * q.y + q.x * p.y + (p.x * p.y + q.x * q.y) * T::lit(2.0));
        }
        let area = a / T::lit(2.0);
        let mx = sx / (a * T::lit(3.0));
        let my = sy / (a * T::lit(3.0));
        let cxx = sxx / (a * T::lit(6.0)) - mx * mx;
        let cyy = syy / (a * T::lit(6.0)) - my * my;
        let cxy = sxy / (a * T::lit(12.0)) - mx * my;
        Moments { area, centroid: o + Vec2::new(mx, my), covariance: Mat2::new(cxx, cxy, cxy, cyy) }
    }

    pub fn bounds(&self) -> (Vec2<T>, Vec2<T>) {
        bounds(&self.vertices)
    }

    /// Largest distance between two vertices (rotating calipers).
    pub fn diameter(&self) -> T {
        let v = &self.vertices;
        let n = v.len();
        let tri = |a: Vec2<T>, b: Vec2<T>, c: Vec2<T>| (b - a).cross(c - a);
        let mut best = T::zero();
        let mut j = 1;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let mut guard = 0;
            while tri(a, b, v[(j + 1) % n]) > tri(a, b, v[j % n]) && guard < n {
                j += 1;
                guard += 1;
            }
            best = best.max(a.dist(v[j % n])).max(b.dist(v[j % n]));
        }
        best
    }

    /// Outward unit normals and offsets: `P = ⋂ {x : n·x ≤ c}`.
    pub fn halfplanes(&self) -> impl Iterator<Item = (Vec2<T>, T)> + '_ {
        (0..self.len()).map(move |i| {
            let (a, b) = self.edge(i);
            let e = b - a;
            let n = Vec2::new(e.y, -e.x) / e.norm();
            (n, n.dot(a))
        })
    }

    /// Outward unit normal of edge `i`.
    pub fn edge_normal(&self, i: usize) -> Vec2<T> {
        let (a, b) = self.edge(i);
        let e = (b - a) / a.dist(b);
        Vec2::new(e.y, -e.x)
    }

    /// Smallest slack `c − n·p` over the edges: positive inside, zero on the boundary.
    pub fn depth(&self, p: Vec2<T>) -> T {
        self.halfplanes().map(|(n, c)| c - n.dot(p)).fold(T::infinity(), T::min)
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        self.contains_with_tol(p, T::lit(T::GEOM_TOL) * self.diameter())
    }

    pub fn contains_with_tol(&self, p: Vec2<T>, tol: T) -> bool {
        self.depth(p) >= -tol
    }

    /// Euclidean distance from `p` to the boundary.
    pub fn boundary_distance(&self, p: Vec2<T>) -> T {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                segment_distance(p, a, b)
            })
            .fold(T::infinity(), T::min)
    }

    pub fn contains_polygon(&self, other: &ConvexPolygon<T>, tol: T) -> bool {
        other.vertices.iter().all(|&p| self.contains_with_tol(p, tol))
    }

    /// `P ∩ {x : n·x ≤ c}`; `None` when the intersection has no interior.
    pub fn clip_halfplane(&self, n: Vec2<T>, c: T) -> Option<Self> {
        let mut out = Vec::with_capacity(self.len() + 1);
        clip_into(&self.vertices, n, c, &mut out);
        if out.len() == self.len() && out == self.vertices {
            return Some(self.clone());
        }
        let diam = self.diameter();
        let area = if out.len() >= 3 { signed_area(&out) } else { T::zero() };
        if !(area > T::lit(T::GEOM_TOL) * diam * diam) {
            return None;
        }
        ConvexPolygon::new(out).ok()
    }

    pub fn intersect(&self, other: &ConvexPolygon<T>) -> Option<Self> {
        let mut cur = self.vertices.clone();
        let mut buf = Vec::with_capacity(cur.len() + other.len());
        for (n, c) in other.halfplanes() {
            clip_into(&cur, n, c, &mut buf);
            std::mem::swap(&mut cur, &mut buf);
            if cur.len() < 3 {
                return None;
            }
        }
        let d = self.diameter().min(other.diameter());
        if !(signed_area(&cur) > T::lit(T::GEOM_TOL) * d * d) {
            return None;
        }
        ConvexPolygon::new(cur).ok()
    }

    pub fn map_points(&self, f: impl Fn(Vec2<T>) -> Vec2<T>) -> Result<Self> {
        ConvexPolygon::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    pub fn transform(&self, m: &AffineMap<T>) -> Self {
        // invertible affine images of convex polygons are convex polygons
        self.map_points(|p| m.apply(p)).expect("affine image of a valid polygon")
    }

    pub fn translate(&self, t: Vec2<T>) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|&p| p + t).collect() }
    }

    /// `center + s (P − center)` for `s > 0`.
    pub fn dilate(&self, center: Vec2<T>, s: T) -> Self {
        assert!(s > T::zero(), "dilation factor must be positive");
        ConvexPolygon { vertices: self.vertices.iter().map(|&p| center + (p - center) * s).collect() }
    }

    /// Exit point of the ray `origin + t·dir`, `t ≥ 0`, for `origin` in the polygon.
    pub fn ray_exit(&self, origin: Vec2<T>, dir: Vec2<T>) -> Option<(Vec2<T>, T)> {
        let mut t_exit = T::infinity();
        for (n, c) in self.halfplanes() {
            let nd = n.dot(dir);
            if nd > T::zero() {
                let t = ((c - n.dot(origin)) / nd).max(T::zero());
                t_exit = t_exit.min(t);
            }
        }
        if t_exit.is_finite() {
            Some((origin + dir * t_exit, t_exit))
        } else {
            None
        }
    }

    /// Point at normalized arc length `s ∈ [0, 1)` from vertex 0, CCW.
    pub fn point_at_arc(&self, s: T) -> Vec2<T> {
        let total = self.perimeter();
        let mut target = (s - s.floor()) * total;
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let l = a.dist(b);
            if target <= l {
                return a.lerp(b, target / l);
            }
            target = target - l;
        }
        self.vertices[0]
    }

    /// Classifies a boundary point, snapping to vertices within `10⁻⁹·diam`.
    pub fn locate_boundary(&self, p: Vec2<T>) -> Result<BoundaryLocation> {
        let diam = self.diameter();
        let on_tol = T::lit(T::GEOM_TOL) * diam;
        let snap = T::lit(1e-9f64.max(10.0 * T::GEOM_TOL)) * diam;
        let (vi, vd) = self.vertices.iter().enumerate().map(|(i, &v)| (i, v.dist(p))).fold((0, T::infinity()), |acc, x| if x.1 < acc.1 { x } else { acc });
        if vd <= snap.max(on_tol) {
            return Ok(BoundaryLocation::Vertex(vi));
        }
        let (ei, ed) = (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                (i, segment_distance(p, a, b))
            })
            .fold((0, T::infinity()), |acc, x| if x.1 < acc.1 { x } else { acc });
        if ed <= on_tol {
            Ok(BoundaryLocation::Edge(ei))
        } else {
            Err(Error::NotOnBoundary { distance: ed.f64() })
        }
    }

    /// Centre and radius of the largest inscribed disk.
    pub fn inscribed_disk(&self) -> (Vec2<T>, T) {
        let planes: Vec<(Vec2<T>, T)> = self.halfplanes().collect();
        let mut lo = T::zero();
        let mut hi = self.diameter();
        let mut center = self.centroid();
        let mut buf = Vec::new();
        for _ in 0..60 {
            let r = (lo + hi) / T::lit(2.0);
            let mut cur = self.vertices.clone();
            for &(n, c) in &planes {
                clip_into(&cur, n, c - r, &mut buf);
                std::mem::swap(&mut cur, &mut buf);
                if cur.is_empty() {
                    break;
                }
            }
            if cur.is_empty() {
                hi = r;
            } else {
                lo = r;
                let k = T::from_usize(cur.len()).unwrap();
                center = cur.iter().fold(Vec2::zero(), |s, &p| s + p) / k;
            }
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        (center, lo)
    }

    pub fn cast<U: Real>(&self) -> ConvexPolygon<U> {
        ConvexPolygon { vertices: self.vertices.iter().map(|p| p.cast()).collect() }
    }
}

pub(crate) fn segment_distance<T: Real>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let e = b - a;
    let l2 = e.norm_sq();
    let t = if l2 > T::zero() { ((p - a).dot(e) / l2).max(T::zero()).min(T::one()) } else { T::zero() };
    p.dist(a + e * t)
}

/// Sutherland–Hodgman step against `{x : n·x ≤ c}` on a raw CCW vertex list.
pub(crate) fn clip_into<T: Real>(poly: &[Vec2<T>], n: Vec2<T>, c: T, out: &mut Vec<Vec2<T>>) {
    out.clear();
    let k = poly.len();
    if k == 0 {
        return;
    }
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let dp = n.dot(p) - c;
        let dq = n.dot(q) - c;
        if dp <= T::zero() {
            out.push(p);
        }
        if (dp < T::zero() && dq > T::zero()) || (dp > T::zero() && dq < T::zero()) {
            let t = dp / (dp - dq);
            out.push(p + (q - p) * t);
        }
    }
}
