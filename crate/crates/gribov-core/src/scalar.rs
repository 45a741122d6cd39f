//! Scalar abstraction. Every algorithm in this crate is written once, generic
//! over the working float; `f64` is the precision all desk-scale runs use and
//! `f32` exists for cheap smoke coverage of the generic bounds.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating scalar for the whole crate. Blanket-implemented; f32 and f64 are
/// the intended instantiations.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Conversion for literal constants. Panics only on non-finite input,
    /// which would be a bug at the call site.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal constant must convert")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("index must convert")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// n(n-1)(n-2), the eigenvalue of G = a*^3 a^3 at occupation n. Exact in u64
/// for every n this crate can represent densely.
pub fn lambda_int(n: u64) -> u64 {
    n * n.saturating_sub(1) * n.saturating_sub(2)
}

/// Falling factorial n(n-1)...(n-k+1) for the diagonal of a*^k a^k.
pub fn falling_int(n: u64, k: u32) -> u64 {
    (0..k as u64).map(|j| n.saturating_sub(j)).product()
}
