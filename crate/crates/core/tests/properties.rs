//! Invariants of the solver and the section machinery, checked on fixed
//! solved instances over generated inputs.

mod common;

use std::sync::OnceLock;

use common::*;
use otreg_core::analysis::*;
use otreg_core::geometry::{fit_ellipse, normalizing_map};
use otreg_core::oracles::{exact_assignment, QuadraticField};
use otreg_core::solver::*;
use otreg_core::{Mat2d, Polygon, Vec2d};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

struct Instance {
    sol: Solution,
    psi: IndexedPotential,
    dual: otreg_core::Potential,
}

/// A random hull transported onto another random hull.
fn hulls() -> &'static Instance {
    static S: OnceLock<Instance> = OnceLock::new();
    S.get_or_init(|| {
        let mut r = rng(71);
        let u1 = random_polygon(&mut r, 9);
        let u2 = random_polygon(&mut r, 9);
        let sol = solve(&u1, &u2, 1500, 3);
        let psi = IndexedPotential::new(sol.potential.clone()).unwrap();
        let dual = legendre_dual(&sol);
        Instance { sol, psi, dual }
    })
}

/// Point at fraction `t` of the way from the centroid of `p` to its boundary point at arc `s`.
fn point_in(p: &Polygon, s: f64, t: f64) -> Vec2d {
    let c = p.centroid();
    let b = p.point_at_arc(s);
    c + (b - c) * t
}

fn unit() -> impl Strategy<Value = f64> {
    0.0f64..1.0
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn diagram_tiles_and_ignores_weight_shift(seed in any::<u64>(), scale in 1e-4f64..0.02, shift in -1.0f64..1.0) {
        let inst = hulls();
        let mut r = rng(seed);
        let w = DualWeights((0..inst.sol.cloud.len()).map(|_| r.gen_range(-scale..scale)).collect());
        let d = power_diagram(&inst.sol.source, &inst.sol.cloud, &w).unwrap();
        let area = inst.sol.source.area();
        prop_assert!((d.total_area() - area).abs() <= 1e-9 * area);
        let shifted = DualWeights(w.0.iter().map(|x| x + shift).collect());
        let d2 = power_diagram(&inst.sol.source, &inst.sol.cloud, &shifted).unwrap();
        for (a, b) in d.areas.iter().zip(&d2.areas) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn young_inequality_and_equality(s in unit(), t in unit(), s2 in unit(), t2 in 0.0f64..1.2) {
        let inst = hulls();
        let x = point_in(&inst.sol.source, s, t);
        let y = point_in(&inst.sol.cloud.domain, s2, t2);
        let psi = &inst.sol.potential;
        prop_assert!(psi.value(x) + inst.dual.value(y) >= x.dot(y) - 1e-12);
        let g = inst.sol.map(x);
        prop_assert!((psi.value(x) + inst.dual.value(g) - x.dot(g)).abs() < 1e-10);
    }

    #[test]
    fn map_is_monotone(a in (unit(), unit()), b in (unit(), unit())) {
        let inst = hulls();
        let (x, x2) = (point_in(&inst.sol.source, a.0, a.1), point_in(&inst.sol.source, b.0, b.1));
        prop_assert!((inst.sol.map(x) - inst.sol.map(x2)).dot(x - x2) >= -1e-12);
    }

    #[test]
    fn sections_are_exact_and_nested(s in unit(), t in unit(), h in 1e-3f64..0.05, k in 1.1f64..3.0) {
        let inst = hulls();
        let x0 = point_in(&inst.sol.source, s, t);
        let p = inst.sol.map(x0);
        let small = inst.psi.section(x0, p, h).unwrap();
        let big = inst.psi.section(x0, p, k * h).unwrap();
        let cap = |q: Vec2d| inst.sol.potential.value(x0) + p.dot(q - x0) + h;
        for &q in small.polygon.vertices() {
            prop_assert!(inst.sol.potential.value(q) - cap(q) <= 1e-9);
        }
        prop_assert!(big.polygon.contains_polygon(&small.polygon, 1e-9));
    }

    #[test]
    fn centred_sections_are_centred(s in unit(), t in 0.0f64..0.7, h in 2e-3f64..0.02) {
        let inst = hulls();
        let x0 = point_in(&inst.sol.source, s, t);
        if let Ok(sec) = inst.psi.centred_section(x0, h, None, &CentringOptions::default()) {
            prop_assert!((sec.polygon.centroid() - x0).norm() <= 1e-6 * sec.polygon.diameter());
        }
    }

    #[test]
    fn weak_obliqueness_everywhere(s in unit()) {
        let inst = hulls();
        let x0 = inst.sol.source.point_at_arc(s);
        let o = obliqueness_check(&inst.psi, &inst.sol.cloud.domain, x0, &ObliquenessOptions::default()).unwrap();
        prop_assert!(o.margin >= -1e-6, "{}", o.margin);
    }

    #[test]
    fn hessian_is_exact_on_quadratics(seed in any::<u64>(), r in 0.01f64..0.5) {
        let mut g = rng(seed);
        let q = QuadraticField { hessian: random_spd(&mut g), gradient: v(g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0)), constant: g.gen_range(-1.0..1.0) };
        let x = v(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0));
        let est = hessian_estimate(&q, None, x, r).unwrap();
        prop_assert!((est.hessian - q.hessian).frobenius() <= 1e-8 * (1.0 + q.hessian.frobenius()));
        prop_assert!(est.hessian.b == est.hessian.c);
    }

    #[test]
    fn assignment_beats_any_permutation(seed in any::<u64>(), n in 2usize..40) {
        let mut g = rng(seed);
        let m = 1.0 / n as f64;
        let s: Vec<(Vec2d, f64)> = (0..n).map(|_| (v(g.gen(), g.gen()), m)).collect();
        let t: Vec<(Vec2d, f64)> = (0..n).map(|_| (v(g.gen(), g.gen()), m)).collect();
        let a = exact_assignment(&s, &t).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut g);
        let other: f64 = perm.iter().enumerate().map(|(i, &j)| 0.5 * m * (s[i].0 - t[j].0).norm_sq()).sum();
        prop_assert!(a.cost <= other + 1e-12);
        let mut seen = a.permutation.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    /// Normalizing matrices of a section and of a section of its
    /// renormalization compose submultiplicatively.
    #[test]
    fn renormalization_norms_are_submultiplicative(s in unit(), t in 0.0f64..0.6, h in 3e-3f64..0.03, tt in 0.1f64..0.9) {
        let inst = hulls();
        let x0 = point_in(&inst.sol.source, s, t);
        let opts = CentringOptions::default();
        let Ok(sec) = inst.psi.centred_section(x0, h, None, &opts) else { return Ok(()) };
        let e = fit_ellipse(&sec.polygon, h).unwrap();
        let pair = renormalize(&inst.psi, None, &inst.sol.cloud.domain, x0, h, &e, false, None).unwrap();
        prop_assert!((pair.normalizing.det() - 1.0).abs() < 1e-12);
        let u = IndexedPotential::new(pair.u.clone()).unwrap();
        let Ok(st) = u.centred_section(Vec2d::zero(), tt, None, &opts) else { return Ok(()) };
        let a_t = normalizing_map(&fit_ellipse(&st.polygon, tt).unwrap()).linear;
        let a_h: Mat2d = pair.normalizing;
        let lhs = (a_t * a_h).norm().powi(2);
        let rhs = a_t.norm().powi(2) * a_h.norm().powi(2);
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }
}
