//! Certified enclosures of `ln`, `exp` and `sqrt` by rational series with
//! explicit tail bounds. Intermediate values are rounded outward to a dyadic
//! grid so that sizes stay proportional to the requested precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::RatInterval;

fn scale(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

pub fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let s = scale(bits);
    BigRational::new((x * BigRational::from_integer(s.clone())).floor().to_integer(), s)
}

pub fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let s = scale(bits);
    BigRational::new((x * BigRational::from_integer(s.clone())).ceil().to_integer(), s)
}

fn out(iv: RatInterval, bits: u32) -> RatInterval {
    RatInterval::new(round_down(&iv.lo, bits), round_up(&iv.hi, bits))
}

/// `2 atanh(z)` for `0 <= z <= 1/3`, enclosure of width about `2^-bits`.
fn two_atanh(z: &BigRational, bits: u32) -> RatInterval {
    let wb = bits + 16;
    let z2 = z * z;
    let eps = BigRational::new(BigInt::one(), scale(wb));
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    let mut pw = z.clone();
    let mut k = 1u64;
    loop {
        let term = &pw / BigRational::from_integer(BigInt::from(k));
        lo += round_down(&term, wb);
        hi += round_up(&term, wb);
        pw = round_up(&(&pw * &z2), wb + 8);
        // remaining terms are bounded by pw / (1 - z^2) <= 9/8 pw
        let tail = &pw * BigRational::new(BigInt::from(9), BigInt::from(8));
        if tail < eps {
            hi += tail;
            break;
        }
        k += 2;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    RatInterval::new(lo * &two, hi * two)
}

pub fn ln2(bits: u32) -> RatInterval {
    two_atanh(&BigRational::new(BigInt::one(), BigInt::from(3)), bits)
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_rat(x: &BigRational, bits: u32) -> RatInterval {
    assert!(x.is_positive(), "ln of non-positive value");
    // x = 2^k y with y in [1, 2)
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut y = x * pow2(-k);
    while y >= BigRational::from_integer(BigInt::from(2)) {
        y /= BigRational::from_integer(BigInt::from(2));
        k += 1;
    }
    while y < BigRational::one() {
        y *= BigRational::from_integer(BigInt::from(2));
        k -= 1;
    }
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let extra = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let ly = two_atanh(&z, bits + 2);
    let l2 = ln2(bits + extra + 2);
    let kq = BigRational::from_integer(BigInt::from(k));
    let l2k = if k >= 0 {
        RatInterval::new(&l2.lo * &kq, &l2.hi * &kq)
    } else {
        RatInterval::new(&l2.hi * &kq, &l2.lo * &kq)
    };
    out(ly + l2k, bits + 4)
}

/// Enclosure of `ln` over a positive interval.
pub fn ln_interval(x: &RatInterval, bits: u32) -> RatInterval {
    RatInterval::new(ln_rat(&x.lo, bits).lo, ln_rat(&x.hi, bits).hi)
}

/// Enclosure of `exp x` for rational `x`.
pub fn exp_rat(x: &BigRational, bits: u32) -> RatInterval {
    // halve until |x / 2^s| <= 1/2, then square s times
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut s = 0u32;
    let mut r = x.clone();
    while r.abs() > half {
        r /= BigRational::from_integer(BigInt::from(2));
        s += 1;
    }
    let mag_bits = (x.abs().ceil().to_integer().bits() as u32 + 2) * 2;
    let wb = bits + 2 * s + 16 + mag_bits;
    let eps = BigRational::new(BigInt::one(), scale(wb));
    let mut lo = BigRational::one();
    let mut hi = BigRational::one();
    let mut term = BigRational::one();
    let mut k = 1u64;
    loop {
        term = &term * &r / BigRational::from_integer(BigInt::from(k));
        lo += round_down(&term, wb);
        hi += round_up(&term, wb);
        term = if term.is_negative() { round_down(&term, wb + 8) } else { round_up(&term, wb + 8) };
        // |tail| <= 2 |next term| since |r| <= 1/2
        let bound = term.abs() * &half * BigRational::from_integer(BigInt::from(2));
        if bound < eps {
            lo -= &bound;
            hi += &bound;
            break;
        }
        k += 1;
    }
    let mut iv = RatInterval::new(lo, hi);
    for _ in 0..s {
        iv = RatInterval::new(round_down(&(&iv.lo * &iv.lo), wb), round_up(&(&iv.hi * &iv.hi), wb));
    }
    out(iv, bits + 4)
}

/// Enclosure of `exp` over an interval.
pub fn exp_interval(x: &RatInterval, bits: u32) -> RatInterval {
    RatInterval::new(exp_rat(&x.lo, bits).lo, exp_rat(&x.hi, bits).hi)
}

/// Enclosure of `sqrt` over a non-negative interval.
pub fn sqrt_interval(x: &RatInterval, bits: u32) -> RatInterval {
    assert!(!x.lo.is_negative(), "sqrt of negative value");
    let s2 = BigRational::from_integer(scale(2 * bits));
    let s = scale(bits);
    let lo_n = (&x.lo * &s2).floor().to_integer();
    let hi_n = (&x.hi * &s2).ceil().to_integer();
    let lo = lo_n.sqrt();
    let mut hi = hi_n.sqrt();
    if &hi * &hi < hi_n {
        hi += 1;
    }
    RatInterval::new(BigRational::new(lo, s.clone()), BigRational::new(hi, s))
}

/// `r^s` for rational `r > 0` and an interval exponent.
pub fn pow_rat_interval(r: &BigRational, s: &RatInterval, bits: u32) -> RatInterval {
    let l = ln_rat(r, bits + 8);
    let prod = l * s.clone();
    let p = out(prod, bits + 8);
    exp_interval(&p, bits)
}

/// Smallest `b` with `2^-b <= w`.
pub fn bits_for(w: &BigRational) -> u32 {
    let mut b = 0u32;
    let (n, d) = (w.numer().clone(), w.denom().clone());
    let q = d.div_floor(&n);
    b += q.bits() as u32;
    b + 1
}
