//! Real scalar abstraction. All numerics in this crate are generic over the
//! real type underlying `Complex<T>`; `f64` is the production type and `f32`
//! is supported with looser default tolerances.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// floating point: f32 or f64
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Default relative residual gate for certificates.
    const RESIDUAL_REL: f64;
    /// Default single-linkage radius for eigenvalue clusters.
    const EIG_CLUSTER: f64;
    /// Default relative singular-value cut for numerical rank.
    const RANK_CUT: f64;

    /// Converts an `f64` literal. Panics only for values not representable at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const RESIDUAL_REL: f64 = 1e-9;
    const EIG_CLUSTER: f64 = 1e-7;
    const RANK_CUT: f64 = 1e-10;
}

impl Real for f32 {
    const RESIDUAL_REL: f64 = 2e-3;
    const EIG_CLUSTER: f64 = 2e-2;
    const RANK_CUT: f64 = 1e-5;
}

/// Shorthand for a complex number from real and imaginary parts given as `f64`.
#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
