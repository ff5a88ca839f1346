//! Real scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the linear algebra and entanglement code is generic over.
///
/// Tolerances throughout the crate are written for `f64`. [`Real::tol`] maps
/// such a tolerance onto the precision of the implementing type, so the same
/// code path runs in `f32` with proportionally looser acceptance windows.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` tolerance into one meaningful at this precision.
    fn tol(f64_tol: f64) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn tol(f64_tol: f64) -> Self {
        f64_tol
    }
}

impl Real for f32 {
    #[inline]
    fn tol(f64_tol: f64) -> Self {
        // ratio of machine epsilons, capped so that no check becomes vacuous
        let scale = (f32::EPSILON as f64) / f64::EPSILON;
        (f64_tol * scale).min(1e-2) as f32
    }
}
