//! Floating-point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::{Product, Sum};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the quadrature stack is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Product
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, saturating to infinity when out of range.
    fn lit(v: f64) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn erf(self) -> Self;
    fn erfc(self) -> Self;

    /// Standard normal cumulative distribution function.
    fn norm_cdf(self) -> Self {
        Self::lit(0.5) * (-self / Self::SQRT_2()).erfc()
    }

    /// Standard normal density.
    fn norm_pdf(self) -> Self {
        (-(self * self) / Self::lit(2.0)).exp() / (Self::TAU()).sqrt()
    }
}

impl Scalar for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }
    fn erf(self) -> Self {
        libm::erff(self)
    }
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

impl Scalar for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }
    fn erf(self) -> Self {
        libm::erf(self)
    }
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

#[inline]
pub(crate) fn sq_dist<S: Scalar>(x: &[S], y: &[S]) -> S {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}
