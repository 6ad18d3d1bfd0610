//! Scalar abstraction: the whole crate is generic over the floating-point
//! type through this trait, with `f32`/`f64` as the provided instances.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar used throughout the simulation core.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into this scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable")
    }

    /// Two, as a scalar.
    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }

    /// One half, as a scalar.
    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}
