//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Lengths, coordinates and constant estimates are generic over a floating
//! point type so that the same algorithms run in `f32` (compact meshes) and
//! `f64` (default, used for every report).

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as a length.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only for values the type cannot hold.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("value representable in scalar type")
    }

    /// Lossless-as-possible widening to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
