//! Floating point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; used for constants and sampled noise.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in every Scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Pairwise summation; the result does not depend on how work was split
/// across threads, only on the order of `values`.
pub fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        values.iter().fold(T::zero(), |acc, &v| acc + v)
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}
