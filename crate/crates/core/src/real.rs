//! Scalar abstraction for the numerical core.
//!
//! Every kernel in this crate is generic over [`Real`], so the whole stack
//! can be instantiated at `f32` or `f64`. The crate root exports `f64`
//! aliases, which is what the CLI and the acceptance suite use.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the spectral and stochastic kernels.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    ///
    /// Random draws and tabulated constants are produced in `f64` and then
    /// narrowed, which keeps sampling streams identical across scalar types.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Lossy widening back to `f64` (used by reporting and CSV output).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn of_round_trips_through_f64() {
        assert_eq!(<f64 as Real>::of(0.125), 0.125);
        assert_eq!(<f32 as Real>::of(0.125), 0.125f32);
        assert_eq!(1.5f64.as_f64(), 1.5);
    }
}
