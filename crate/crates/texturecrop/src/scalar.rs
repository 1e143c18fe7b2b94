//! Floating-point scalar abstraction for pixel intensities and scores.

use std::fmt::{Debug, Display};
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type for intensities, texture statistics and detector scores.
///
/// Everything in this crate works on values normalized to `[0, 1]`, so any
/// IEEE float is usable; `f64` is the default choice of the CLI.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + AddAssign + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + AddAssign + Debug + Display + Send + Sync + 'static
{
}

/// Lossy conversion from `f64`, panicking only for exotic scalar types.
pub(crate) fn from_f64<S: Scalar>(value: f64) -> S {
    S::from(value).expect("f64 must convert into the scalar type")
}

/// Widening conversion to `f64` for serialization and reporting.
pub(crate) fn to_f64<S: Scalar>(value: S) -> f64 {
    value.to_f64().expect("scalar must convert into f64")
}
