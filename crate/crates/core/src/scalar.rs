//! Scalar abstraction for the geometry layer.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the geometric primitives.
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static {
    /// Relative tolerance for geometric predicates, as a fraction of the diameter.
    const GEOM_TOL: f64;
    /// Allowed deviation of `det` from one for unimodular maps.
    const UNIMODULAR_TOL: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits in scalar type")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const GEOM_TOL: f64 = 1e-10;
    const UNIMODULAR_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const GEOM_TOL: f64 = 1e-5;
    const UNIMODULAR_TOL: f64 = 1e-5;
}
