//! Scalar abstraction so the whole stack runs on `f32` or `f64`.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// Blanket-implemented for anything float-like (`f32`, `f64`). Counts and
/// round indices are converted through [`FromPrimitive`]; with `f32` this
/// loses precision above 2^24 plays per arm, which is far beyond any
/// simulation horizon this crate targets.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from a count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as scalar")
    }

    /// Lossy conversion from a size.
    fn from_size(n: usize) -> Self {
        Self::from_usize(n).expect("size representable as scalar")
    }

    /// Conversion from an `f64` constant.
    fn from_f64_c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 representable as scalar")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum<T>
        + fmt::Debug
        + fmt::Display
        + Default
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_generic<F: Scalar>(xs: &[F]) -> F {
        xs.iter().copied().sum()
    }

    #[test]
    fn works_for_both_float_widths() {
        assert_eq!(sum_generic(&[1.0f32, 2.0, 3.0]), 6.0f32);
        assert_eq!(sum_generic(&[1.0f64, 2.0, 3.0]), 6.0f64);
        assert_eq!(f64::from_count(7), 7.0);
        assert_eq!(f32::from_size(4), 4.0);
    }
}
