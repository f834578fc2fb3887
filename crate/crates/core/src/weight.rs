use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;

/// Arc weights form a commutative ring. Implementations supply the ring
/// operations plus a normal form used when comparing symbolic results.
pub trait Weight: Clone + std::fmt::Debug + std::fmt::Display + PartialEq {
    /// Whether weights are symbolic expressions. Symbolic diagonals are kept
    /// as-is when a matrix is turned into a digraph; numeric diagonals equal
    /// to zero still produce no root arc.
    const SYMBOLIC: bool = false;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// Canonical form for equality checks. Numeric types are already
    /// canonical; symbolic expressions expand to a sorted polynomial.
    fn normalize(&self) -> Result<Self> {
        Ok(self.clone())
    }

    /// Numeric value, if the weight is a plain number.
    fn to_f64(&self) -> Option<f64>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }
}

impl Weight for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn to_f64(&self) -> Option<f64> {
        Some(rational_to_f64(self))
    }
}

/// Render a rational without the `BigRational` debug-ish `numer/denom` form
/// when the denominator is one.
pub fn rational_to_string(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parse `p` or `p/q` into a rational.
pub fn rational_from_str(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: num_bigint::BigInt = num.trim().parse().ok()?;
        let den: num_bigint::BigInt = den.trim().parse().ok()?;
        if Zero::is_zero(&den) {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let int: num_bigint::BigInt = text.parse().ok()?;
        Some(BigRational::from_integer(int))
    }
}

/// Parse a decimal literal such as `-3`, `0.25`, or `1e-3` into an exact
/// rational. Used by the expression parser and numeric file readers.
pub fn rational_from_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let numer: num_bigint::BigInt = digits.parse().ok()?;
    let mut value = BigRational::from_integer(numer);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(10.into());
    let mut pow = BigRational::from_integer(1.into());
    for _ in 0..shift.unsigned_abs() {
        pow *= &ten;
    }
    if shift >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Some(value)
}

/// Best-effort conversion to `f64` for display and numeric evaluation.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    let numer = value.numer();
    let denom = value.denom();
    let approx_num = bigint_to_f64(numer);
    let approx_den = bigint_to_f64(denom);
    approx_num / approx_den
}

fn bigint_to_f64(value: &num_bigint::BigInt) -> f64 {
    let digits = value.abs().to_string();
    let parsed: f64 = digits.parse().unwrap_or(f64::INFINITY);
    if value.is_negative() {
        -parsed
    } else {
        parsed
    }
}
