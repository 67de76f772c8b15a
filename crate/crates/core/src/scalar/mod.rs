//! Scalar abstraction shared by every numerical routine in the crate.

mod dd;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use dd::{DoubleDouble, ParseDoubleDoubleError};

/// Real floating point type the algorithms are generic over.
///
/// Implemented for `f32`, `f64` and [`DoubleDouble`].
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion used for diagnostics and serialization.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count or index.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
impl Real for DoubleDouble {}

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta - tau * (theta / tau).floor();
    if r >= tau || r < T::zero() {
        T::zero()
    } else {
        r
    }
}
