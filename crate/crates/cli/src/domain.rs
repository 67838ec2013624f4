//! Domain generators.

use std::f64::consts::PI;

use otreg_core::{Affine2d, Mat2d, Polygon, Vec2d};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CornerRole, DomainSpec, Shape, Transform};

type Result<T> = otreg_core::Result<T>;

fn invalid(msg: &str) -> otreg_core::Error {
    otreg_core::Error::InvalidInput(msg.into())
}

/// Regular `n`-gon of unit area centred at the origin with a horizontal bottom edge.
pub fn regular(n: usize) -> Result<Polygon> {
    if n < 3 {
        return Err(invalid("a regular polygon needs at least 3 sides"));
    }
    let nf = n as f64;
    // area of the circumradius-r polygon is ½ n r² sin(2π/n)
    let r = (2.0 / (nf * (2.0 * PI / nf).sin())).sqrt();
    let (half, depth) = (r * (PI / nf).sin(), -r * (PI / nf).cos());
    let verts = (0..n)
        .map(|k| match k {
            // the bottom edge, exactly horizontal and symmetric
            0 => Vec2d::new(half, depth),
            _ if k == n - 1 => Vec2d::new(-half, depth),
            _ => {
                let a = -PI / 2.0 + PI / nf + 2.0 * PI * k as f64 / nf;
                Vec2d::new(r * a.cos(), r * a.sin())
            }
        })
        .collect();
    Polygon::new(verts)
}

/// Hull of `m` seeded points in the unit square, centred and scaled to unit area.
pub fn random_hull(m: usize, seed: u64) -> Result<Polygon> {
    if m < 3 {
        return Err(invalid("a random hull needs at least 3 points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec2d> = (0..m).map(|_| Vec2d::new(rng.gen(), rng.gen())).collect();
    let hull = Polygon::hull(&pts)?;
    let c = hull.centroid();
    let s = 1.0 / hull.area().sqrt();
    hull.map_points(|p| (p - c) * s)
}

pub fn rectangle(aspect: f64) -> Result<Polygon> {
    if !(aspect > 0.0 && aspect.is_finite()) {
        return Err(invalid("aspect must be positive"));
    }
    let a = aspect.sqrt();
    Polygon::rectangle(Vec2d::new(0.0, 0.0), Vec2d::new(a, 1.0 / a))
}

pub fn wedge(angle_deg: f64) -> Result<Polygon> {
    if !(angle_deg > 0.0 && angle_deg < 180.0) {
        return Err(invalid("wedge angle must lie in (0, 180) degrees"));
    }
    let th = angle_deg.to_radians();
    let r = (2.0 / th.sin()).sqrt();
    Polygon::new(vec![Vec2d::zero(), Vec2d::new(r, 0.0), Vec2d::new(r * th.cos(), r * th.sin())])
}

pub fn corner_pair(role: CornerRole) -> Result<Polygon> {
    match role {
        CornerRole::Source => Polygon::rectangle(Vec2d::new(-1.0, 0.0), Vec2d::new(0.0, 1.0)),
        CornerRole::Target => {
            let l = 2f64.sqrt();
            Polygon::new(vec![Vec2d::zero(), Vec2d::new(0.0, l), Vec2d::new(-l, 0.0)])
        }
    }
}

fn apply(p: Polygon, t: &Transform) -> Result<Polygon> {
    let mut p = p;
    if let Some([[a, b], [c, d]]) = t.linear {
        let m = Mat2d::new(a, b, c, d);
        if !(m.det() > 0.0) {
            return Err(invalid("linear transform must have positive determinant"));
        }
        p = p.transform(&Affine2d::linear(m)?);
    }
    if let Some(deg) = t.rotate_deg {
        p = p.transform(&Affine2d::linear(Mat2d::rotation(deg.to_radians()))?);
    }
    if let Some([x, y]) = t.translate {
        p = p.translate(Vec2d::new(x, y));
    }
    Ok(p)
}

impl DomainSpec {
    pub fn build(&self) -> Result<Polygon> {
        let p = match &self.shape {
            Shape::Regular { sides } => regular(*sides)?,
            Shape::RandomHull { points, seed } => random_hull(*points, *seed)?,
            Shape::Rectangle { aspect } => rectangle(*aspect)?,
            Shape::Wedge { angle_deg } => wedge(*angle_deg)?,
            Shape::CornerPair { role } => corner_pair(*role)?,
            Shape::Vertices { vertices } => Polygon::new(vertices.iter().map(|&[x, y]| Vec2d::new(x, y)).collect())?,
        };
        match &self.transform {
            Some(t) => apply(p, t),
            None => Ok(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_square_is_the_centred_unit_square() {
        let p = regular(4).unwrap();
        let (lo, hi) = p.bounds();
        assert!((lo - Vec2d::new(-0.5, -0.5)).norm() < 1e-15 && (hi - Vec2d::new(0.5, 0.5)).norm() < 1e-15);
        for n in [3, 5, 6, 17] {
            let p = regular(n).unwrap();
            assert!((p.area() - 1.0).abs() < 1e-12);
            assert_eq!(p.len(), n);
            let low = p.bounds().0.y;
            assert!((0..n).map(|i| p.edge(i)).any(|(a, b)| a.y == low && b.y == low && a.x == -b.x));
        }
        assert!(regular(2).is_err());
    }

    #[test]
    fn rectangle_of_aspect_four() {
        assert_eq!(rectangle(4.0).unwrap().bounds(), (Vec2d::new(0.0, 0.0), Vec2d::new(2.0, 0.5)));
        assert!(rectangle(0.0).is_err());
    }

    #[test]
    fn random_hull_is_reproducible() {
        let a = serde_json::to_string(&random_hull(12, 7).unwrap()).unwrap();
        let b = serde_json::to_string(&random_hull(12, 7).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, serde_json::to_string(&random_hull(12, 8).unwrap()).unwrap());
        let p = random_hull(12, 7).unwrap();
        assert!((p.area() - 1.0).abs() < 1e-12 && p.centroid().norm() < 1e-12);
    }

    #[test]
    fn wedge_and_corner_pair_have_unit_area() {
        for deg in [30.0, 90.0, 150.0] {
            let w = wedge(deg).unwrap();
            assert!((w.area() - 1.0).abs() < 1e-12);
        }
        assert!(wedge(180.0).is_err());
        for role in [CornerRole::Source, CornerRole::Target] {
            let p = corner_pair(role).unwrap();
            assert!((p.area() - 1.0).abs() < 1e-12);
            assert!(p.vertices().iter().all(|v| v.x <= 0.0 && v.y >= 0.0));
        }
    }

    #[test]
    fn transforms_compose_in_order() {
        let spec = DomainSpec {
            shape: Shape::Regular { sides: 4 },
            transform: Some(Transform { linear: Some([[2.0, 0.0], [0.0, 0.5]]), rotate_deg: Some(90.0), translate: Some([1.0, 0.0]) }),
        };
        let (lo, hi) = spec.build().unwrap().bounds();
        assert!((lo - Vec2d::new(0.75, -1.0)).norm() < 1e-12 && (hi - Vec2d::new(1.25, 1.0)).norm() < 1e-12);
        let bad =
            DomainSpec { shape: Shape::Regular { sides: 4 }, transform: Some(Transform { linear: Some([[0.0, 1.0], [1.0, 0.0]]), ..Default::default() }) };
        assert!(bad.build().is_err());
    }
}
