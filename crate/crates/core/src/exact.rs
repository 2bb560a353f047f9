//! Small exact-arithmetic helpers shared by threshold computations.

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::ToPrimitive;

/// `⌊base^(exp)⌋` for a nonnegative rational exponent, exact.
///
/// A floating-point estimate is corrected with big-integer comparisons
/// `r^q ≤ base^p < (r+1)^q`.
pub(crate) fn floor_pow(base: u64, exp: Rational64) -> u64 {
    let p = *exp.numer();
    let q = *exp.denom();
    assert!(p >= 0 && q > 0, "exponent must be nonnegative");
    let (p, q) = (p as u32, q as u32);
    let target = BigUint::from(base).pow(p);
    let fits = |r: u64| BigUint::from(r).pow(q) <= target;
    let est = (base as f64).powf(p as f64 / q as f64).floor();
    let mut r = if est.is_finite() && est >= 0.0 { est as u64 } else { 0 };
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// Exact `base^(exp)` if it is an integer.
pub(crate) fn exact_pow(base: u64, exp: Rational64) -> Option<u64> {
    let r = floor_pow(base, exp);
    let p = *exp.numer() as u32;
    let q = *exp.denom() as u32;
    (BigUint::from(r).pow(q) == BigUint::from(base).pow(p)).then_some(r)
}

/// `⌈log₂ x⌉`, with `⌈log₂ 1⌉ = 0`.
pub(crate) fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `⌈√x⌉`.
pub(crate) fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while r * r < x {
        r += 1;
    }
    r
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn rational(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}
