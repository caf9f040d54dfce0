//! Rational helpers: canonical `p/q` text form and outward float conversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical text form `p/q` (always with a denominator).
pub fn format_rat(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, `p`, or a finite decimal such as `-0.25`.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_digits.is_empty() { BigInt::zero() } else { ip_digits.parse().map_err(|_| bad())? };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = BigRational::new(whole * &den + frac, den);
        return Ok(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

fn approx(x: &BigRational) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            if x.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

/// A float that is certainly `<= x`.
pub fn rat_to_f64_down(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let a = approx(x);
    if x.is_integer() && a.abs() < 9.0e15 {
        return a;
    }
    a.next_down().next_down()
}

/// A float that is certainly `>= x`.
pub fn rat_to_f64_up(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let a = approx(x);
    if x.is_integer() && a.abs() < 9.0e15 {
        return a;
    }
    a.next_up().next_up()
}

pub fn two() -> BigRational {
    int(2)
}

/// `base^e` for integer (possibly negative) exponents.
pub fn pow_i(base: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Number of bits of `max(|numerator|, denominator)`.
pub fn height_bits(x: &BigRational) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

pub fn half(x: &BigRational) -> BigRational {
    x / two()
}

pub fn one() -> BigRational {
    BigRational::one()
}
