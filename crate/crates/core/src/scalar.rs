//! Scalar abstraction shared by every engine.
//!
//! All numerics are written against [`Real`], which is implemented for `f32`
//! and `f64`. The acceptance tolerances assume `f64`; `f32` is useful for
//! quick exploratory scans only.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Floating point scalar usable by the simulation engines.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Signed
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon of the type.
    const EPS: Self;

    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion of an index or count.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const EPS: Self = f32::EPSILON;
}

impl Real for f64 {
    const EPS: Self = f64::EPSILON;
}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn i_unit<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}
