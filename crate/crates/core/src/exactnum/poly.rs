//! Dense univariate polynomials with integer coefficients, plus the
//! Sturm-sequence machinery used for real-root counting.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::RatInterval;

/// Integer polynomial, constant term first. The zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    /// `x` itself.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `q*x - p` for the rational `p/q`.
    pub fn linear_root(r: &BigRational) -> Self {
        Self::new(vec![-r.numer().clone(), r.denom().clone()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        // Horner with a common denominator to avoid repeated gcds.
        let n = x.numer();
        let d = x.denom();
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        // acc / d^deg
        let deg = self.coeffs.len().saturating_sub(1);
        BigRational::new(acc, num_traits::pow(d.clone(), deg))
    }

    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let v = self.eval(x);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn eval_interval(&self, x: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::point(BigRational::zero());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &RatInterval::point(BigRational::from_integer(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigInt::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Clears denominators with a positive multiplier (sign-preserving).
    pub fn from_rational_coeffs(c: &[BigRational]) -> Self {
        let l = c.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        Self::new(c.iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()).collect())
    }

    pub fn to_rational_coeffs(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Primitive gcd with positive leading coefficient; `gcd(0,0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let a = QPoly::from_int(self);
        let b = QPoly::from_int(o);
        QPoly::gcd(a, b).to_int().primitive()
    }

    /// Exact quotient over the rationals, returned as a primitive integer polynomial.
    pub fn div_exact(&self, o: &Self) -> Self {
        let (q, r) = QPoly::from_int(self).div_rem(&QPoly::from_int(o));
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q.to_int().primitive()
    }

    /// `p / gcd(p, p')`, primitive with positive leading coefficient.
    pub fn square_free_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g)
    }

    pub fn is_square_free(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Bound `B` with every real root in `[-B, B]` (Cauchy).
    pub fn root_bound(&self) -> BigRational {
        let lc = self.leading().expect("nonzero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        BigRational::one() + BigRational::new(m, lc)
    }

    pub fn sturm_sequence(&self) -> SturmSequence {
        SturmSequence::new(self)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Rational-coefficient polynomial used for Euclid-style computations.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn from_int(p: &IntPolynomial) -> Self {
        QPoly(p.to_rational_coeffs())
    }

    pub fn to_int(&self) -> IntPolynomial {
        IntPolynomial::from_rational_coeffs(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.deg().expect("division by zero polynomial");
        let lc = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (QPoly(Vec::new()), QPoly::new(r));
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] / &lc;
            if !coef.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &coef * dc;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.div_rem(d).1
    }

    pub fn gcd(mut a: QPoly, mut b: QPoly) -> QPoly {
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            // keep sizes in check by rescaling to an integer primitive polynomial
            b = if r.is_zero() { r } else { QPoly::from_int(&r.to_int().primitive()) };
        }
        a
    }
}

/// Sturm sequence of the square-free part of a polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<IntPolynomial>,
}

impl SturmSequence {
    pub fn new(p: &IntPolynomial) -> Self {
        let p0 = p.square_free_part();
        let mut seq = vec![p0.clone()];
        if p0.degree().unwrap_or(0) == 0 {
            return SturmSequence { seq };
        }
        seq.push(p0.derivative().primitive());
        loop {
            let n = seq.len();
            let r = QPoly::from_int(&seq[n - 2]).rem(&QPoly::from_int(&seq[n - 1]));
            if r.is_zero() {
                break;
            }
            // -r scaled by a positive constant
            let next = r.to_int().neg();
            let g = next.content();
            let next = IntPolynomial::new(next.coeffs().iter().map(|c| c / &g).collect());
            seq.push(next);
        }
        SturmSequence { seq }
    }

    pub fn base(&self) -> &IntPolynomial {
        &self.seq[0]
    }

    fn variations_with<F: Fn(&IntPolynomial) -> i8>(&self, sign: F) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in &self.seq {
            let s = sign(p);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    pub fn variations(&self, x: &BigRational) -> usize {
        self.variations_with(|p| p.sign_at(x))
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`.
    pub fn count_open(&self, lo: &BigRational, hi: &BigRational) -> usize {
        if lo >= hi {
            return 0;
        }
        let c = self.variations(lo) - self.variations(hi);
        if self.seq[0].sign_at(hi) == 0 {
            c - 1
        } else {
            c
        }
    }

    /// Number of distinct real roots in the closed interval `[lo, hi]`.
    pub fn count_closed(&self, lo: &BigRational, hi: &BigRational) -> usize {
        if lo > hi {
            return 0;
        }
        if lo == hi {
            return usize::from(self.seq[0].sign_at(lo) == 0);
        }
        let c = self.variations(lo) - self.variations(hi);
        if self.seq[0].sign_at(lo) == 0 {
            c + 1
        } else {
            c
        }
    }
}
