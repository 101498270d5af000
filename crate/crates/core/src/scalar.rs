//! Integer scalars and exact rationals.
//!
//! Every computation in this crate is exact. The lattice code is generic over a
//! fixed-width signed integer type; rationals appear only where a division is
//! unavoidable (slopes, Gaussian elimination) and use [`Ratio`] over the same
//! integer type.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{PrimInt, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use num_rational::Ratio;

/// Gathers the traits needed for exact lattice arithmetic.
pub trait Scalar:
    PrimInt + Signed + Integer + Hash + Debug + Display + Send + Sync + Serialize + DeserializeOwned + 'static
{
}

impl Scalar for i32 {}
impl Scalar for i64 {}
impl Scalar for i128 {}

/// Rational numbers over the scalar type.
pub type Q<T> = Ratio<T>;

/// Converts a small machine integer into the scalar type.
#[inline]
pub fn s<T: Scalar>(v: i64) -> T {
    T::from(v).expect("value out of range for scalar type")
}

/// The positive part `max(0, v)`.
#[inline]
pub fn pos<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        v
    } else {
        T::zero()
    }
}

/// Greatest common divisor of all entries, always nonnegative.
pub fn gcd_all<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |g, &x| g.gcd(&x))
}

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd<T: Scalar>(a: T, b: T) -> (T, T, T) {
    let e = a.extended_gcd(&b);
    if e.gcd < T::zero() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Least common multiple of the denominators of a rational vector.
pub fn common_denominator<T: Scalar>(v: &[Q<T>]) -> T {
    v.iter().fold(T::one(), |l, q| l.lcm(q.denom()))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
/// The zero vector maps to the zero vector.
pub fn primitive_from_rational<T: Scalar>(v: &[Q<T>]) -> Vec<T> {
    let l = common_denominator(v);
    let ints: Vec<T> = v.iter().map(|q| (*q * Q::from_integer(l)).to_integer()).collect();
    primitive(&ints)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive<T: Scalar>(v: &[T]) -> Vec<T> {
    let g = gcd_all(v);
    if g.is_zero() {
        v.to_vec()
    } else {
        v.iter().map(|&x| x / g).collect()
    }
}

/// Dot product of two integer vectors.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
