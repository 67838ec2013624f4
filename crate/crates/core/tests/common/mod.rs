#![allow(dead_code)]

use otreg_core::potential::Piece;
use otreg_core::solver::{newton_solve, sample_target, Solution, SolverOptions};
use otreg_core::{Mat2d, Polygon, Potential, Vec2d};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(x: f64, y: f64) -> Vec2d {
    Vec2d::new(x, y)
}

pub fn centred_square() -> Polygon {
    Polygon::rectangle(v(-0.5, -0.5), v(0.5, 0.5)).unwrap()
}

pub fn unit_square() -> Polygon {
    Polygon::rectangle(v(0.0, 0.0), v(1.0, 1.0)).unwrap()
}

/// Convex hull of `m` uniform points in a box; retried until non-degenerate.
pub fn random_polygon(rng: &mut ChaCha8Rng, m: usize) -> Polygon {
    loop {
        let pts: Vec<Vec2d> = (0..m).map(|_| v(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if let Ok(p) = Polygon::hull(&pts) {
            if p.len() >= 3 && p.area() > 0.05 {
                return p;
            }
        }
    }
}

/// Random matrix with determinant one.
pub fn random_unimodular(rng: &mut ChaCha8Rng) -> Mat2d {
    loop {
        let m = Mat2d::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let d = m.det();
        if d.abs() > 0.2 {
            let s = 1.0 / d.abs().sqrt();
            let m = m.scale(s);
            return if d > 0.0 { m } else { Mat2d::new(m.b, m.a, m.d, m.c) };
        }
    }
}

pub fn random_spd(rng: &mut ChaCha8Rng) -> Mat2d {
    let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (l1, l2) = (rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0));
    let r = Mat2d::rotation(th);
    r * Mat2d::diag(l1, l2) * r.transpose()
}

/// Max of the tangent planes of `½x·Ax` at a `k×k` grid over the bounding box
/// of `u`: the exact extension of the quadratic restricted to `u`, up to grid spacing.
pub fn tangent_planes(a: Mat2d, u: &Polygon, k: usize) -> Potential {
    let (lo, hi) = u.bounds();
    let mut pieces = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            let x = v(lo.x + (hi.x - lo.x) * i as f64 / k as f64, lo.y + (hi.y - lo.y) * j as f64 / k as f64);
            if !u.contains_with_tol(x, 1e-12) {
                continue;
            }
            let g = a * x;
            pieces.push(Piece { slope: g, intercept: 0.5 * x.dot(g) });
        }
    }
    Potential::new(pieces, u.clone())
}

pub fn solve(u1: &Polygon, u2: &Polygon, n: usize, seed: u64) -> Solution {
    let cloud = sample_target(u2, n, u1.area(), seed).unwrap();
    newton_solve(u1, &cloud, &SolverOptions::default()).unwrap()
}
