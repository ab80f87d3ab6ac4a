//! Scalar abstraction for pixel intensities.
//!
//! Image buffers are generic over [`Real`] so datasets can be held in `f32`
//! while all randomness and training math stays in `f64`. Conversions between
//! the two go through `f64`, which is exact for every `f32` value.

use std::fmt::Debug;

/// Floating-point scalar usable as a pixel intensity: `f32` or `f64`.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + num_traits::ToPrimitive + Debug + Send + Sync + 'static
{
    /// Nearest representable value to `v`.
    fn from_f64_lossy(v: f64) -> Self;

    /// Exact widening to `f64`.
    fn to_f64_exact(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64_exact(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64_exact(self) -> f64 {
        self
    }
}
