//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Real scalar type underlying all complex arithmetic (implemented for `f32` and `f64`).
///
/// The associated constants are the default tolerances for that precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Serialize + Send + Sync + 'static
{
    /// Relative tail bound used to stop series and products.
    const EPS_TRUNC: f64;
    /// Relative tolerance for membership in a discrete spiral `q^Z`.
    const EPS_SPIRAL: f64;
    /// Relative tolerance under which two eigenvalues are treated as equal.
    const EPS_CLUSTER: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every supported precision")
    }

    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EPS_TRUNC: f64 = 1e-17;
    const EPS_SPIRAL: f64 = 1e-9;
    const EPS_CLUSTER: f64 = 1e-8;
}

impl Real for f32 {
    const EPS_TRUNC: f64 = 1e-8;
    const EPS_SPIRAL: f64 = 1e-4;
    const EPS_CLUSTER: f64 = 1e-3;
}

pub(crate) fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn two_pi_i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::TAU())
}
