//! Integer cut-offs for real thresholds such as (1−ε)Δ, computed on the exact binary
//! value of each `f64` so that boundary cases never depend on rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("threshold parameters are finite")
}

/// (c + Σ kᵢ·εᵢ)·Δ as an exact rational.
pub fn affine(constant: i64, terms: &[(i64, f64)], delta: usize) -> BigRational {
    let mut sum = BigRational::from_integer(BigInt::from(constant));
    for &(k, eps) in terms {
        sum += exact(eps) * BigRational::from_integer(BigInt::from(k));
    }
    sum * BigRational::from_integer(BigInt::from(delta))
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("threshold fits in i64")
}

/// Largest integer `k` with `k <= x`.
pub fn floor(x: &BigRational) -> i64 {
    to_i64(&x.floor().to_integer())
}

/// Smallest integer `k` with `k >= x`.
pub fn ceil(x: &BigRational) -> i64 {
    to_i64(&x.ceil().to_integer())
}

/// Smallest non-negative count satisfying `count >= (1−ε)Δ`.
pub fn min_count_one_minus(eps: f64, delta: usize) -> usize {
    let x = affine(1, &[(-1, eps)], delta);
    if x.is_negative() || x.is_zero() {
        0
    } else {
        ceil(&x) as usize
    }
}

/// `count <= x`.
pub fn le(count: usize, x: &BigRational) -> bool {
    (count as i64) <= floor(x)
}

/// `count < x`.
pub fn lt(count: usize, x: &BigRational) -> bool {
    (count as i64) < ceil(x)
}
