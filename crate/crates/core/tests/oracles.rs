mod common;

use common::*;
use otreg_core::geometry::angle;
use otreg_core::oracles::*;
use otreg_core::{Error, Mat2d, Vec2d};
use rand::seq::SliceRandom;
use rand::Rng;

fn cost_of(src: &[(Vec2d, f64)], tgt: &[(Vec2d, f64)], perm: &[usize]) -> f64 {
    src.iter().zip(perm).map(|(s, &j)| s.1 * 0.5 * (s.0 - tgt[j].0).norm_sq()).sum()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn random_points(r: &mut impl Rng, n: usize, m: f64) -> Vec<(Vec2d, f64)> {
    (0..n).map(|_| (v(r.gen(), r.gen()), m)).collect()
}

#[test]
fn assignment_single_pair() {
    let a = exact_assignment(&[(v(1.0, 2.0), 1.0)], &[(v(2.0, 2.0), 1.0)]).unwrap();
    assert_eq!(a.permutation, vec![0]);
    assert_eq!(a.cost, 0.5);
}

#[test]
fn assignment_of_identical_sets_is_identity() {
    let mut r = rng(1);
    let pts = random_points(&mut r, 60, 0.1);
    let a = exact_assignment(&pts, &pts).unwrap();
    assert_eq!(a.permutation, (0..60).collect::<Vec<_>>());
    assert_eq!(a.cost, 0.0);
}

#[test]
fn assignment_matches_enumeration() {
    let mut r = rng(2);
    for n in 1..=7 {
        let (s, t) = (random_points(&mut r, n, 0.3), random_points(&mut r, n, 0.3));
        let best = all_permutations(n).iter().map(|p| cost_of(&s, &t, p)).fold(f64::INFINITY, f64::min);
        let a = exact_assignment(&s, &t).unwrap();
        assert!((a.cost - best).abs() < 1e-12, "n = {n}");
        assert!((cost_of(&s, &t, &a.permutation) - a.cost).abs() < 1e-12);
    }
}

#[test]
fn assignment_beats_random_permutations() {
    let mut r = rng(3);
    let (s, t) = (random_points(&mut r, 100, 0.01), random_points(&mut r, 100, 0.01));
    let a = exact_assignment(&s, &t).unwrap();
    let mut perm: Vec<usize> = (0..100).collect();
    for _ in 0..10_000 {
        perm.shuffle(&mut r);
        assert!(a.cost <= cost_of(&s, &t, &perm) + 1e-12);
    }
}

#[test]
fn assignment_errors() {
    let mut r = rng(4);
    let big = random_points(&mut r, MAX_ASSIGNMENT + 1, 1.0);
    assert!(matches!(exact_assignment(&big, &big), Err(Error::SizeExceeded { .. })));
    let s = vec![(v(0.0, 0.0), 1.0), (v(1.0, 0.0), 2.0)];
    assert!(exact_assignment(&s, &s).is_err());
    assert!(exact_assignment(&s[..1], &s).is_err());
}

#[test]
fn analytic_identity_pair() {
    let p = AnalyticPair::new(Mat2d::identity(), centred_square()).unwrap();
    assert_eq!(p.eta(), 1.0);
    assert!((p.psi(v(0.2, -0.4)) - 0.1).abs() < 1e-15);
    let u2 = p.u2();
    assert_eq!(u2.len(), 4);
    assert!(u2.vertices().iter().all(|&q| centred_square().vertices().iter().any(|&w| (q - w).norm() < 1e-15)));
}

#[test]
fn analytic_diagonal_pair() {
    for a in [1.5, 3.0, 7.0] {
        let p = AnalyticPair::diagonal(a, centred_square()).unwrap();
        assert!((p.eta() - a).abs() < 1e-12);
        for h in [1e-3, 0.1, 2.0] {
            let e = p.section_at_zero(h);
            assert!((e.eccentricity() - a).abs() < 1e-12);
            assert!((e.semi_short - (2.0 * h / a).sqrt()).abs() < 1e-12);
            assert!((e.semi_long - (2.0 * h * a).sqrt()).abs() < 1e-12);
            // the dual section is the perpendicular ellipse
            let d = p.dual_section_at_zero(h);
            assert!((d.eccentricity() - e.eccentricity()).abs() < 1e-12);
            assert!(angle(d.e_long, e.e_short()).unwrap().min(std::f64::consts::PI - angle(d.e_long, e.e_short()).unwrap()) < 1e-12);
        }
    }
}

#[test]
fn analytic_young_equality() {
    let mut r = rng(5);
    for _ in 0..50 {
        let a = random_spd(&mut r);
        let a = a.scale(1.0 / a.det().sqrt());
        let p = AnalyticPair::new(a, centred_square()).unwrap();
        for _ in 0..20 {
            let x = v(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5));
            let y = v(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let gap = p.psi(x) + p.dual(p.map(x)) - x.dot(p.map(x));
            assert!(gap.abs() < 1e-12 * (1.0 + p.psi(x)));
            assert!(p.psi(x) + p.dual(y) >= x.dot(y) - 1e-12);
        }
    }
}

#[test]
fn analytic_pair_validation() {
    assert!(matches!(AnalyticPair::new(Mat2d::diag(2.0, 2.0), centred_square()), Err(Error::NotUnimodular(_))));
    assert!(AnalyticPair::new(Mat2d::new(1.0, 0.5, 0.0, 1.0), centred_square()).is_err());
    assert!(AnalyticPair::new(Mat2d::diag(-1.0, -1.0), centred_square()).is_err());
}

#[test]
fn extended_potential_is_the_quadratic_inside() {
    let p = AnalyticPair::diagonal(2.0, unit_square()).unwrap();
    for x in [v(0.0, 0.0), v(0.5, 0.5), v(1.0, 0.25)] {
        assert!((p.extended_psi(x) - p.psi(x)).abs() < 1e-12);
    }
    // outside, below the quadratic and convex along a line
    let (a, b) = (v(1.5, 0.5), v(1.5, 1.5));
    let fa = p.extended_psi(a);
    let fb = p.extended_psi(b);
    assert!(fa < p.psi(a) && fb < p.psi(b));
    assert!(p.extended_psi(a.lerp(b, 0.5)) <= 0.5 * (fa + fb) + 1e-12);
}

#[test]
fn ma_residual_examples() {
    let mut r = rng(6);
    let u1 = random_polygon(&mut r, 9);
    let u2 = random_polygon(&mut r, 9);
    let sol = solve(&u1, &u2, 500, 1);
    let tol = 1e-7 * u1.area();
    for i in 0..500 {
        assert!(ma_residual(&sol, &[i]).unwrap() <= tol);
    }
    let all: Vec<usize> = (0..500).collect();
    assert!(ma_residual(&sol, &all).unwrap() <= 1e-9);
    for _ in 0..20 {
        let mut q = all.clone();
        q.shuffle(&mut r);
        let (a, b) = (&q[..10], &q[10..20]);
        let ra = ma_residual(&sol, a).unwrap();
        let rb = ma_residual(&sol, b).unwrap();
        assert!(ra <= 10.0 * tol);
        // disjoint unions are subadditive
        assert!(ma_residual(&sol, &q[..20]).unwrap() <= ra + rb + 1e-15);
    }
    assert!(matches!(ma_residual(&sol, &[]), Err(Error::NotCellUnion(_))));
    assert!(matches!(ma_residual(&sol, &[3, 3]), Err(Error::NotCellUnion(_))));
    assert!(matches!(ma_residual(&sol, &[500]), Err(Error::NotCellUnion(_))));
}
