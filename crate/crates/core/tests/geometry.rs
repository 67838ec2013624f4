mod common;

use std::f64::consts::PI;

use common::*;
use otreg_core::geometry::{angle, fit_ellipse, left_tangent, normalizing_map, right_tangent, Cone};
use otreg_core::{Affine2d, Ellipse2d, Mat2d, Polygon, Vec2d};
use proptest::prelude::*;
use rand::Rng;

// Fan triangulation from an interior point, written independently of the shoelace.
fn fan_area(p: &Polygon) -> f64 {
    let vs = p.vertices();
    let c = vs.iter().fold(Vec2d::zero(), |s, &q| s + q) / vs.len() as f64;
    (0..vs.len())
        .map(|i| {
            let a = vs[i] - c;
            let b = vs[(i + 1) % vs.len()] - c;
            0.5 * (a.x * b.y - a.y * b.x).abs()
        })
        .sum()
}

fn regular(n: usize, r: f64) -> Polygon {
    Polygon::new((0..n).map(|k| v(r * (2.0 * PI * k as f64 / n as f64).cos(), r * (2.0 * PI * k as f64 / n as f64).sin())).collect()).unwrap()
}

#[test]
fn area_examples() {
    assert_eq!(unit_square().area(), 1.0);
    let t = Polygon::new(vec![v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)]).unwrap();
    assert_eq!(t.area(), 0.5);
    let mut r = rng(3);
    for _ in 0..20 {
        let p = random_polygon(&mut r, 10);
        assert!((p.area() - fan_area(&p)).abs() <= 1e-12 * p.area());
    }
}

#[test]
fn canonicalization() {
    // clockwise input with a duplicate and a collinear midpoint
    let p = Polygon::new(vec![v(0.0, 0.0), v(0.0, 1.0), v(1.0, 1.0), v(1.0, 1.0), v(1.0, 0.5), v(1.0, 0.0)]).unwrap();
    assert_eq!(p.len(), 4);
    assert!(p.area() > 0.0);
    assert!(Polygon::new(vec![v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)]).is_err());
    assert!(Polygon::new(vec![v(0.0, 0.0), v(2.0, 0.0), v(1.0, 0.2), v(1.0, 2.0)]).is_err());
}

#[test]
fn clip_examples() {
    let sq = unit_square();
    let half = sq.clip_halfplane(v(1.0, 0.0), 0.5).unwrap();
    assert_eq!(half.bounds(), (v(0.0, 0.0), v(0.5, 1.0)));
    assert!((half.area() - 0.5).abs() < 1e-15);
    let same = sq.clip_halfplane(v(0.0, 1.0), 3.0).unwrap();
    assert_eq!(same.vertices(), sq.vertices());
    assert!(sq.clip_halfplane(v(0.0, 1.0), -1.0).is_none());
}

#[test]
fn angle_examples() {
    assert!((angle(v(1.0, 0.0), v(0.0, 1.0)).unwrap() - PI / 2.0).abs() < 1e-15);
    assert_eq!(angle(v(1.0, 0.0), v(1.0, 0.0)).unwrap(), 0.0);
    assert!((angle(v(1.0, 0.0), v(-1.0, 1.0)).unwrap() - 0.75 * PI).abs() < 1e-15);
    assert!(angle(v(0.0, 0.0), v(1.0, 0.0)).is_err());
}

#[test]
fn cone_membership() {
    let c = Cone::new(v(1.0, 1.0), v(0.0, 2.0), PI / 4.0).unwrap();
    assert!(c.contains(v(1.0, 3.0)));
    assert!(c.contains(v(1.5, 2.0)));
    assert!(!c.contains(v(3.0, 2.0)));
    assert!(!c.contains(v(1.0, 1.0)));
}

#[test]
fn eccentricity_and_perp_examples() {
    let e = Ellipse2d::new(v(0.0, 0.0), 1.0, 3.0, v(1.0, 0.0)).unwrap();
    assert_eq!(e.eccentricity(), 3.0);
    let c = Ellipse2d::circle(v(2.0, 1.0), 0.5).unwrap();
    assert_eq!(c.eccentricity(), 1.0);
    assert_eq!(c.perp(), c);
    let sq = Ellipse2d::circle(Vec2d::zero(), 1.0).unwrap().transform(&Affine2d::linear(Mat2d::diag(2.0, 0.5)).unwrap());
    assert!((sq.eccentricity() - 4.0).abs() < 1e-12);
    let p = Ellipse2d::new(Vec2d::zero(), 1.0, 2.0, v(1.0, 0.0)).unwrap().perp();
    assert_eq!((p.e_long, p.semi_short, p.semi_long), (v(0.0, 1.0), 1.0, 2.0));
}

#[test]
fn fit_ellipse_examples() {
    let r = Polygon::rectangle(v(-1.0, -3.0), v(1.0, 3.0)).unwrap();
    let e = fit_ellipse(&r, r.area()).unwrap();
    assert!((e.eccentricity() - 3.0).abs() < 1e-12);
    assert!(e.e_long.x.abs() < 1e-12);
    assert!((e.area() - 12.0).abs() < 1e-12);

    // the uniform disk of radius 1 has covariance I/4; the 256-gon is within 10⁻⁴ of it
    let disk = regular(256, 1.0);
    let e = fit_ellipse(&disk, PI).unwrap();
    assert!(e.center.norm() < 1e-12);
    assert!((e.semi_short - 1.0).abs() < 1e-3 && (e.semi_long - 1.0).abs() < 1e-3);
}

#[test]
fn normalizing_map_examples() {
    let m = normalizing_map(&Ellipse2d::circle(v(3.0, -1.0), 2.0).unwrap());
    assert!((m.linear - Mat2d::identity()).frobenius() < 1e-15);
    assert_eq!(m.apply(v(3.0, -1.0)), Vec2d::zero());

    let e = Ellipse2d::new(Vec2d::zero(), 1.0, 4.0, v(1.0, 0.0)).unwrap();
    let m = normalizing_map(&e);
    assert!((m.linear - Mat2d::diag(0.5, 2.0)).frobenius() < 1e-15);
    assert!((m.norm().powi(2) - 4.0).abs() < 1e-12);
}

#[test]
fn tangent_examples() {
    let sq = unit_square();
    let (l, r) = (left_tangent(&sq, Vec2d::zero()).unwrap(), right_tangent(&sq, Vec2d::zero()).unwrap());
    assert_eq!((l.direction, r.direction), (v(0.0, 1.0), v(1.0, 0.0)));
    let (l, r) = (left_tangent(&sq, v(0.5, 0.0)).unwrap(), right_tangent(&sq, v(0.5, 0.0)).unwrap());
    assert_eq!((l.direction, r.direction), (v(-1.0, 0.0), v(1.0, 0.0)));
    assert!(left_tangent(&sq, v(0.5, 0.5)).is_err());

    let hex = regular(6, 1.0);
    let x0 = hex.vertex(2);
    let (l, r) = (left_tangent(&hex, x0).unwrap().direction, right_tangent(&hex, x0).unwrap().direction);
    assert!((angle(l, r).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
    // rotating R counter-clockwise by the interior angle gives L
    assert!((r.rotate(2.0 * PI / 3.0) - l).norm() < 1e-12);
}

#[test]
fn tangent_snaps_near_vertex() {
    let sq = unit_square();
    let l = left_tangent(&sq, v(1e-11, 0.0)).unwrap();
    assert_eq!(l.direction, v(0.0, 1.0));
}

#[test]
fn fit_ellipse_equivariance_random() {
    let mut r = rng(11);
    for _ in 0..100 {
        let p = random_polygon(&mut r, 12);
        let m = Affine2d::unimodular(random_unimodular(&mut r), v(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).unwrap();
        let a = p.area();
        let lhs = fit_ellipse(&p.transform(&m), a).unwrap();
        let rhs = fit_ellipse(&p, a).unwrap().transform(&m);
        assert!((lhs.center - rhs.center).norm() < 1e-9);
        assert!((lhs.shape() - rhs.shape()).frobenius() < 1e-9 * lhs.shape().frobenius());
    }
}

fn arb_polygon() -> impl Strategy<Value = Polygon> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..14).prop_filter_map("degenerate hull", |pts| {
        let pts: Vec<Vec2d> = pts.into_iter().map(|(x, y)| v(x, y)).collect();
        Polygon::hull(&pts).ok().filter(|p| p.area() > 1e-3)
    })
}

fn arb_ellipse() -> impl Strategy<Value = Ellipse2d> {
    (-2.0f64..2.0, -2.0f64..2.0, 0.05f64..3.0, 1.0f64..20.0, 0.0f64..(2.0 * PI))
        .prop_map(|(cx, cy, s, ratio, th)| Ellipse2d::new(v(cx, cy), s, s * ratio, v(th.cos(), th.sin())).unwrap())
}

proptest! {
    #[test]
    fn clip_partitions_area(p in arb_polygon(), th in 0.0f64..(2.0 * PI), off in -1.0f64..1.0) {
        let n = v(th.cos(), th.sin());
        let a = p.clip_halfplane(n, off).map_or(0.0, |q| q.area());
        let b = p.clip_halfplane(-n, -off).map_or(0.0, |q| q.area());
        prop_assert!((a + b - p.area()).abs() <= 1e-12 * p.area().max(1.0));
        prop_assert!(a <= p.area() * (1.0 + 1e-12));
        if let Some(q) = p.clip_halfplane(n, off) {
            // still a valid CCW convex polygon
            prop_assert!(Polygon::new(q.vertices().to_vec()).is_ok());
        }
    }

    #[test]
    fn perp_is_involution(e in arb_ellipse()) {
        prop_assert_eq!(e.perp().perp(), e);
        prop_assert_eq!(e.perp().eccentricity(), e.eccentricity());
    }

    #[test]
    fn normalizing_map_is_unimodular_and_rounds(e in arb_ellipse()) {
        let m = normalizing_map(&e);
        prop_assert!((m.det() - 1.0).abs() < 1e-12);
        prop_assert!((m.norm().powi(2) - e.eccentricity()).abs() < 1e-9 * e.eccentricity());
        let d = e.transform(&m);
        prop_assert!((d.eccentricity() - 1.0).abs() < 1e-9);
        prop_assert!(d.center.norm() < 1e-9 * (1.0 + e.center.norm()));
        prop_assert!((d.area() - e.area()).abs() < 1e-9 * e.area());
    }

    #[test]
    fn operator_norm_is_submultiplicative(a in (0.1f64..3.0, -3.0f64..3.0, 0.0f64..PI), b in (0.1f64..3.0, -3.0f64..3.0, 0.0f64..PI)) {
        let mk = |(s, shear, th): (f64, f64, f64)| Mat2d::rotation(th) * Mat2d::new(s, shear, 0.0, 1.0 / s);
        let (ma, mb) = (mk(a), mk(b));
        prop_assert!((ma * mb).norm() <= ma.norm() * mb.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn tangents_support_the_polygon(p in arb_polygon(), s in 0.0f64..1.0) {
        let x0 = p.point_at_arc(s);
        let tol = 1e-9 * p.diameter();
        for ray in [left_tangent(&p, x0).unwrap(), right_tangent(&p, x0).unwrap()] {
            let d = ray.direction;
            // the interior lies on one side of the tangent line
            let sides: Vec<f64> = p.vertices().iter().map(|&q| d.cross(q - x0)).collect();
            let all_left = sides.iter().all(|&c| c >= -tol);
            let all_right = sides.iter().all(|&c| c <= tol);
            prop_assert!(all_left || all_right);
        }
    }

    #[test]
    fn contains_matches_halfplanes(p in arb_polygon(), x in -1.2f64..1.2, y in -1.2f64..1.2) {
        let q = v(x, y);
        let inside = p.halfplanes().all(|(n, c)| n.dot(q) <= c);
        prop_assert_eq!(p.contains(q), inside);
    }
}
