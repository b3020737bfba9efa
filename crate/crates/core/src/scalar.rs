//! Scalar abstraction shared by every numerical module.
//!
//! All kernels are written against [`Real`], which `f32` and `f64` satisfy.
//! Complex fields use [`Cplx`] built on top of the same real type.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

pub use nalgebra::Complex;

/// Real floating point type the toolkit can run on.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Lossless-for-literals conversion from an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Machine epsilon of the underlying representation.
    fn machine_eps() -> Self;

    /// Smallest positive normal value.
    fn tiny() -> Self;
}

impl Real for f32 {
    fn machine_eps() -> Self {
        f32::EPSILON
    }

    fn tiny() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn machine_eps() -> Self {
        f64::EPSILON
    }

    fn tiny() -> Self {
        f64::MIN_POSITIVE
    }
}

/// Complex scalar over a [`Real`].
pub type Cplx<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// Squared modulus without the square root.
#[inline]
pub fn norm_sqr<T: Real>(z: Cplx<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Euclidean norm of a complex slice.
pub fn vec_norm<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + norm_sqr(*z)).sqrt()
}
