//! Real algebraic numbers: a square-free defining polynomial together with
//! an isolating interval.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::RwLock;

use num_rational::BigRational;
use num_traits::Signed;

use super::interval::{FInterval, RatInterval};
use super::poly::{IntPolynomial, SturmSequence};
use super::rational::two;
use crate::error::{Error, Result};

/// A real algebraic number. The isolator is either a single rational point
/// (rational root) or an open interval `(lo, hi)` whose endpoints are not
/// roots and which contains exactly one root of `defining`.
pub struct AlgebraicNumber {
    defining: IntPolynomial,
    isolator: RatInterval,
    tight: RwLock<RatInterval>,
}

impl Clone for AlgebraicNumber {
    fn clone(&self) -> Self {
        AlgebraicNumber {
            defining: self.defining.clone(),
            isolator: self.isolator.clone(),
            tight: RwLock::new(self.tight.read().unwrap().clone()),
        }
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.defining == o.defining && self.isolator == o.isolator
    }
}
impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.defining.hash(h);
        self.isolator.hash(h);
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for AlgebraicNumber {
    /// Representation order (not numeric order).
    fn cmp(&self, o: &Self) -> Ordering {
        (&self.defining, &self.isolator.lo, &self.isolator.hi).cmp(&(
            &o.defining,
            &o.isolator.lo,
            &o.isolator.hi,
        ))
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} in {}", self.defining, self.isolator)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl AlgebraicNumber {
    pub fn from_rational(r: BigRational) -> Self {
        let iso = RatInterval::point(r.clone());
        AlgebraicNumber {
            defining: IntPolynomial::linear_root(&r),
            tight: RwLock::new(iso.clone()),
            isolator: iso,
        }
    }

    /// Validates and normalises: the defining polynomial is replaced by its
    /// primitive square-free part, and a root sitting on a closed endpoint
    /// collapses the isolator to that point.
    pub fn new(defining: IntPolynomial, isolator: RatInterval) -> Result<Self> {
        if defining.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidInput("defining polynomial must have a root".into()));
        }
        let p = defining.square_free_part();
        if isolator.lo == isolator.hi {
            if p.sign_at(&isolator.lo) != 0 {
                return Err(Error::InvalidInput(format!("{} is not a root of {}", isolator.lo, p)));
            }
            return Ok(Self::from_rational(isolator.lo));
        }
        for e in [&isolator.lo, &isolator.hi] {
            if p.sign_at(e) == 0 {
                let s = p.sturm_sequence();
                if s.count_closed(&isolator.lo, &isolator.hi) == 1 {
                    return Ok(Self::from_rational(e.clone()));
                }
                return Err(Error::InvalidInput("isolator does not isolate a single root".into()));
            }
        }
        let s = p.sturm_sequence();
        let c = s.count_open(&isolator.lo, &isolator.hi);
        if c != 1 {
            return Err(Error::InvalidInput(format!(
                "isolator {} contains {} roots of {}",
                isolator, c, p
            )));
        }
        let out = AlgebraicNumber { defining: p, tight: RwLock::new(isolator.clone()), isolator };
        if out.defining.degree() == Some(1) {
            return Ok(Self::from_rational(out.as_rational().unwrap()));
        }
        Ok(out)
    }

    /// Unchecked constructor for isolators produced by root isolation.
    pub(crate) fn from_parts(defining: IntPolynomial, isolator: RatInterval) -> Self {
        AlgebraicNumber { defining, tight: RwLock::new(isolator.clone()), isolator }
    }

    pub fn defining(&self) -> &IntPolynomial {
        &self.defining
    }

    pub fn isolator(&self) -> &RatInterval {
        &self.isolator
    }

    pub fn degree(&self) -> usize {
        self.defining.degree().unwrap_or(0)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.isolator.lo == self.isolator.hi {
            return Some(self.isolator.lo.clone());
        }
        if self.defining.degree() == Some(1) {
            let c = self.defining.coeffs();
            return Some(BigRational::new(-c[0].clone(), c[1].clone()));
        }
        None
    }

    /// An isolator of width at most `width` containing this number.
    pub fn refine(&self, width: &BigRational) -> RatInterval {
        assert!(width.is_positive(), "refinement width must be positive");
        {
            let t = self.tight.read().unwrap();
            if &t.width() <= width {
                return t.clone();
            }
        }
        let mut t = self.tight.read().unwrap().clone();
        let s_lo = self.defining.sign_at(&t.lo);
        while &t.width() > width {
            let m = t.mid();
            let s = self.defining.sign_at(&m);
            if s == 0 {
                t = RatInterval::point(m);
                break;
            }
            if s == s_lo {
                t.lo = m;
            } else {
                t.hi = m;
            }
        }
        *self.tight.write().unwrap() = t.clone();
        t
    }

    /// Enclosure with width at most `2^-bits`.
    pub fn enclose_bits(&self, bits: u32) -> RatInterval {
        let w = BigRational::new(1.into(), num_bigint::BigInt::from(1u8) << bits as usize);
        self.refine(&w)
    }

    pub fn to_f64_interval(&self) -> FInterval {
        self.enclose_bits(60).to_f64()
    }

    /// Exact sign of `p` at this number. Zero is decided through
    /// `gcd(p, defining)`, never by refinement alone.
    pub fn sign_of(&self, p: &IntPolynomial) -> i8 {
        if p.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return p.sign_at(&r);
        }
        let g = p.gcd(&self.defining);
        if g.degree().unwrap_or(0) >= 1 {
            // g divides the defining polynomial, so it has at most one root here
            let iso = &self.isolator;
            if g.sturm_sequence().count_open(&iso.lo, &iso.hi) > 0 {
                return 0;
            }
        }
        let sq = SturmSequence::new(p);
        let mut w = self.isolator.width() / two();
        loop {
            let t = self.refine(&w);
            if t.lo == t.hi {
                return p.sign_at(&t.lo);
            }
            if sq.count_closed(&t.lo, &t.hi) == 0 {
                return p.sign_at(&t.lo);
            }
            w = w / BigRational::from_integer(16.into());
        }
    }

    /// Numeric comparison with a rational.
    /// Exact comparison of two real algebraic numbers.
    pub fn cmp_real(&self, o: &AlgebraicNumber) -> Ordering {
        use super::scalar::ExactScalar;
        ExactScalar::from_algebraic(self.clone()).cmp_exact(&ExactScalar::from_algebraic(o.clone()))
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // sign of (x - r)
        match self.sign_of(&IntPolynomial::linear_root(r)) {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

/// Sign of `p` at `x` (free-function form).
pub fn sign_at(p: &IntPolynomial, x: &AlgebraicNumber) -> i8 {
    x.sign_of(p)
}

/// One algebraic number per distinct real root of `p` in the open window
/// `(window.lo, window.hi)`, in increasing order.
pub fn isolate_real_roots(p: &IntPolynomial, window: &RatInterval) -> Result<Vec<AlgebraicNumber>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("cannot isolate roots of the zero polynomial".into()));
    }
    let mut out = Vec::new();
    if p.degree() == Some(0) || window.lo >= window.hi {
        return Ok(out);
    }
    let sq = p.sturm_sequence();
    let base = sq.base().clone();
    let bound = base.root_bound() + BigRational::from_integer(1.into());
    // every root lies strictly inside (-bound, bound)
    let lo = window.lo.clone().max(-bound.clone());
    let hi = window.hi.clone().min(bound);
    isolate_rec(&sq, &base, lo, hi, &mut out);
    Ok(out)
}

fn isolate_rec(
    sq: &SturmSequence,
    base: &IntPolynomial,
    lo: BigRational,
    hi: BigRational,
    out: &mut Vec<AlgebraicNumber>,
) {
    let c = sq.count_open(&lo, &hi);
    if c == 0 {
        return;
    }
    if c == 1 && base.sign_at(&lo) != 0 && base.sign_at(&hi) != 0 {
        let iso = RatInterval::new(lo, hi);
        let a = AlgebraicNumber::from_parts(base.clone(), iso);
        if base.degree() == Some(1) {
            out.push(AlgebraicNumber::from_rational(a.as_rational().unwrap()));
        } else {
            out.push(a);
        }
        return;
    }
    let m = (&lo + &hi) / two();
    isolate_rec(sq, base, lo, m.clone(), out);
    if base.sign_at(&m) == 0 {
        out.push(AlgebraicNumber::from_rational(m.clone()));
    }
    isolate_rec(sq, base, m, hi, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    fn golden() -> AlgebraicNumber {
        let p = IntPolynomial::from_i64(&[-1, 1, 1]);
        isolate_real_roots(&p, &RatInterval::new(rat(1, 2), int(1))).unwrap().remove(0)
    }

    #[test]
    fn isolates_sqrt2() {
        let p = IntPolynomial::from_i64(&[-2, 0, 1]);
        let r = isolate_real_roots(&p, &RatInterval::new(int(0), int(2))).unwrap();
        assert_eq!(r.len(), 1);
        let t = r[0].refine(&rat(1, 1000));
        assert!(t.lo < rat(141422, 100000) && t.hi > rat(141421, 100000));
    }

    #[test]
    fn golden_in_half_one() {
        let g = golden();
        // p(1/2) = -1/4 < 0 and p(1) = 1 > 0
        let t = g.refine(&rat(1, 100));
        assert!(t.width() <= rat(1, 100) && t.contains(&rat(618, 1000)), "{t}");
        let t = g.refine(&rat(1, 1000));
        assert!(t.lo > rat(61, 100) && t.hi < rat(62, 100), "{t}");
    }

    #[test]
    fn root_outside_window() {
        let p = IntPolynomial::from_i64(&[-3, 1]);
        assert!(isolate_real_roots(&p, &RatInterval::new(int(0), int(1))).unwrap().is_empty());
        assert!(isolate_real_roots(&IntPolynomial::zero(), &RatInterval::new(int(0), int(1))).is_err());
    }

    #[test]
    fn rational_and_endpoint_roots() {
        // x (2x - 1)(x - 1): roots 0, 1/2, 1
        let p = IntPolynomial::from_i64(&[0, 1, -3, 2]);
        let r = isolate_real_roots(&p, &RatInterval::new(int(0), int(1))).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].as_rational(), Some(rat(1, 2)));
    }

    #[test]
    fn sign_examples() {
        let g = golden();
        assert_eq!(sign_at(&IntPolynomial::from_i64(&[-1, 1, 1]), &g), 0);
        // x^3 + x - 1 = 3x - 2 modulo the defining relation, and g < 2/3
        assert_eq!(sign_at(&IntPolynomial::from_i64(&[-1, 1, 0, 1]), &g), -1);
        let half = AlgebraicNumber::from_rational(rat(1, 2));
        assert_eq!(sign_at(&IntPolynomial::from_i64(&[-1, 1]), &half), -1);
        // a polynomial sharing the root through a nontrivial gcd
        let q = IntPolynomial::from_i64(&[-1, 1, 1]).mul(&IntPolynomial::from_i64(&[5, 0, 1]));
        assert_eq!(sign_at(&q, &g), 0);
        // same gcd factor, but the isolator holds the other root
        let neg = isolate_real_roots(&IntPolynomial::from_i64(&[-1, 1, 1]), &RatInterval::new(int(-2), int(0)))
            .unwrap()
            .remove(0);
        assert_eq!(sign_at(&IntPolynomial::from_i64(&[-1, 1, 1]), &neg), 0);
        assert_eq!(neg.cmp_rational(&int(-1)), Ordering::Less);
    }

    #[test]
    fn refine_examples() {
        // dyadic bisection: width at most 1/100 and the root inside, not a
        // particular decimal window
        let g = golden();
        let t = g.refine(&rat(1, 100));
        assert!(t.width() <= rat(1, 100) && t.lo > rat(61, 100) && t.hi < rat(63, 100), "{t:?}");
        assert!(g.defining().sign_at(&t.lo) * g.defining().sign_at(&t.hi) < 0);
        let r2 = isolate_real_roots(&IntPolynomial::from_i64(&[-2, 0, 1]), &RatInterval::new(int(1), int(2))).unwrap().remove(0);
        let t = r2.refine(&rat(1, 10));
        assert!(t.width() <= rat(1, 10) && &t.lo * &t.lo < int(2) && &t.hi * &t.hi > int(2), "{t:?}");
    }

    #[test]
    fn refine_rational_is_exact() {
        let a = AlgebraicNumber::from_rational(rat(3, 4));
        let t = a.refine(&rat(1, 1000));
        assert!(t.lo == rat(3, 4) && t.hi == rat(3, 4));
    }
}
