//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the lab can run on: `f32` or `f64`.
///
/// All acceptance tolerances are stated for `f64`; `f32` is supported for
/// quick, low-precision exploration only.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an integer into `Self`.
    #[inline]
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float")
    }

    /// Fractional part in `[0, 1)`.
    #[inline]
    fn frac(self) -> Self {
        let f = self - self.floor();
        if f >= Self::one() {
            Self::zero()
        } else {
            f
        }
    }

    /// Signed distance to the nearest integer, in `[-1/2, 1/2]`.
    #[inline]
    fn centered_frac(self) -> Self {
        self - self.round()
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

pub(crate) fn int_norm_sq(a: &[i64]) -> i64 {
    a.iter().map(|&v| v * v).sum()
}

pub(crate) fn int_dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Volume of the unit ball in `n` dimensions.
pub fn unit_ball_volume<T: Real>(n: usize) -> T {
    // omega_0 = 1, omega_1 = 2, omega_n = omega_{n-2} * 2 pi / n
    let mut even = T::one();
    let mut odd = T::lit(2.0);
    let two_pi = T::lit(2.0) * T::PI();
    if n == 0 {
        return even;
    }
    let mut k = 1;
    while k < n {
        k += 1;
        if k % 2 == 0 {
            even = even * two_pi / T::from_usize(k).unwrap();
        } else {
            odd = odd * two_pi / T::from_usize(k).unwrap();
        }
    }
    if n % 2 == 0 {
        even
    } else {
        odd
    }
}

/// Surface area of the unit sphere `S^{n-1}` embedded in `R^n`.
pub fn sphere_area<T: Real>(n: usize) -> T {
    T::from_usize(n).unwrap() * unit_ball_volume::<T>(n)
}
