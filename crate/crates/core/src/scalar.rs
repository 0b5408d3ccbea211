//! Scalar abstractions shared by the exact and floating parts of the kernel.

use std::fmt::Debug;
use std::iter::Sum;

use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// A field usable in exact or approximate linear algebra: `f32`, `f64`, or
/// [`BigRational`].
///
/// Geometry (affine maps, Jacobians, pullback weights) and the dense
/// elimination routines only need field operations, so they are written once
/// over this trait.
pub trait Field: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    fn from_int(v: i64) -> Self;
    fn as_f64(&self) -> f64;
    /// Whether a pivot candidate should be treated as zero.
    ///
    /// Exact fields compare against zero; floating fields use a small absolute
    /// threshold.
    fn is_negligible(&self) -> bool;
}

impl Field for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }
            fn as_f64(&self) -> f64 {
                *self as f64
            }
            fn is_negligible(&self) -> bool {
                self.abs() <= <$t>::EPSILON * 64.0
            }
        }
    };
}

float_field!(f32);
float_field!(f64);

/// Floating-point scalar used by quadrature and numerical element routines.
pub trait Real: Float + FromPrimitive + Field + Sum + Copy {
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("literal representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
