use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::rational::{rat_to_f64_down, rat_to_f64_up};

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            RatInterval::new(-self.hi.clone(), -self.lo.clone())
        } else {
            let m = if -self.lo.clone() > self.hi { -self.lo.clone() } else { self.hi.clone() };
            RatInterval::new(BigRational::zero(), m)
        }
    }

    /// Largest absolute value of any point in the interval.
    pub fn mag(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn pow(&self, e: u32) -> RatInterval {
        let mut acc = RatInterval::point(BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        if e % 2 == 0 && self.contains_zero() {
            // even powers are nonnegative
            let hi = acc.hi.clone();
            return RatInterval::new(BigRational::zero(), hi);
        }
        acc
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
        )
    }

    pub fn to_f64(&self) -> FInterval {
        FInterval::new(rat_to_f64_down(&self.lo), rat_to_f64_up(&self.hi))
    }

    /// Round endpoints outward to dyadic rationals with `bits` fractional bits.
    pub fn round_out(&self, bits: u32) -> RatInterval {
        let scale = BigInt::one() << bits as usize;
        let lo = (&self.lo * BigRational::from_integer(scale.clone())).floor();
        let hi = (&self.hi * BigRational::from_integer(scale.clone())).ceil();
        let den = BigRational::from_integer(scale);
        RatInterval::new(lo / den.clone(), hi / den)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval::new(-self.hi.clone(), -self.lo.clone())
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        if self.lo == self.hi && o.lo == o.hi {
            return RatInterval::point(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        RatInterval::new(lo, hi)
    }
}

impl Mul<&BigRational> for &RatInterval {
    type Output = RatInterval;
    fn mul(self, k: &BigRational) -> RatInterval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            RatInterval::new(a, b)
        } else {
            RatInterval::new(b, a)
        }
    }
}

macro_rules! owned_interval_op {
    ($tr:ident, $m:ident) => {
        impl $tr for RatInterval {
            type Output = RatInterval;
            fn $m(self, o: RatInterval) -> RatInterval {
                (&self).$m(&o)
            }
        }
    };
}
owned_interval_op!(Add, add);
owned_interval_op!(Sub, sub);
owned_interval_op!(Mul, mul);

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        -&self
    }
}

/// Hardware-float interval with outward rounding, used only as a filter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "float interval out of order: {lo} > {hi}");
        FInterval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        FInterval { lo: x, hi: x }
    }

    pub fn entire() -> Self {
        FInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains_zero(&self) -> bool {
        !(self.lo > 0.0) && !(self.hi < 0.0)
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound of |x| over the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl Add for FInterval {
    type Output = FInterval;
    fn add(self, o: FInterval) -> FInterval {
        FInterval::new((self.lo + o.lo).next_down(), (self.hi + o.hi).next_up())
    }
}

impl Sub for FInterval {
    type Output = FInterval;
    fn sub(self, o: FInterval) -> FInterval {
        FInterval::new((self.lo - o.hi).next_down(), (self.hi - o.lo).next_up())
    }
}

impl Neg for FInterval {
    type Output = FInterval;
    fn neg(self) -> FInterval {
        FInterval::new(-self.hi, -self.lo)
    }
}

impl Mul for FInterval {
    type Output = FInterval;
    fn mul(self, o: FInterval) -> FInterval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if c.iter().any(|v| v.is_nan()) {
            return FInterval::entire();
        }
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        FInterval::new(lo.next_down(), hi.next_up())
    }
}
