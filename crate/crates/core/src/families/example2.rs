//! Maps `u (x + 1)` and `u (x + 2)` with `u` in `(1/2, 1)`.
//!
//! Two words of length `n` have equal ratio `u^n`, and their translations
//! differ by `sum_i (a_i - b_i) u^i`. So `u` has an overlap at level `n` iff
//! it is a root of a nonzero polynomial `sum_{i=1..n} kappa_i x^i` with
//! `kappa_i` in `{-1, 0, 1}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::template::{MapTemplate, Template};
use super::Side;
use crate::error::{Error, Result};
use crate::exactnum::rational::rat;
use crate::exactnum::{isolate_real_roots, AlgebraicNumber, ExactScalar, FInterval, IntPolynomial, MPoly, RatInterval};

pub(crate) fn template(side: Side) -> Template {
    let (nvars, vars): (usize, Vec<(usize, &str)>) = match side {
        Side::U => (1, vec![(0, "u")]),
        Side::V => (1, vec![(0, "v")]),
        Side::Joint => (2, vec![(0, "u"), (1, "v")]),
    };
    let maps = vars
        .into_iter()
        .flat_map(|(i, name)| {
            (1..=2i64).map(move |c| {
                let r = MPoly::var(nvars, i);
                MapTemplate { label: format!("{name}{c}"), t: vec![r.scale(&BigRational::from_integer(c.into()))], ratio: r }
            })
        })
        .collect();
    Template { nvars, dim: 1, maps }
}

pub(crate) fn domain() -> RatInterval {
    RatInterval::new(rat(1, 2), rat(1, 1))
}

pub(crate) fn domain_margin(point: &[ExactScalar]) -> Result<ExactScalar> {
    let x = point.first().ok_or_else(|| Error::InvalidInput("empty parameter point".into()))?;
    let d = domain();
    let m = (x - &ExactScalar::from(d.lo)).min_exact(&ExactScalar::from(d.hi) - x);
    if m.sign() <= 0 {
        return Err(Error::Domain(format!("{x} is outside (1/2, 1)")));
    }
    Ok(m)
}

/// `sum_i kappa_i x^i` for a word pair; letters end in their digit `1` or `2`.
pub(crate) fn witness_poly(a: &[String], b: &[String]) -> Result<IntPolynomial> {
    let digit = |l: &String| -> Result<i64> {
        match l.chars().last() {
            Some('1') => Ok(1),
            Some('2') => Ok(2),
            _ => Err(Error::UnknownLabel(l.clone())),
        }
    };
    let mut c = vec![BigInt::zero()];
    for (x, y) in a.iter().zip(b) {
        c.push(BigInt::from(digit(x)? - digit(y)?));
    }
    Ok(IntPolynomial::new(c))
}

/// Drops factors of `x`; the domain excludes 0.
fn strip_x(p: &IntPolynomial) -> IntPolynomial {
    let k = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    IntPolynomial::new(p.coeffs()[k..].to_vec())
}

fn roots_in(p: &IntPolynomial, window: &RatInterval) -> Result<Vec<AlgebraicNumber>> {
    let p = strip_x(p);
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    isolate_real_roots(&p, window)
}

fn intersect(a: &RatInterval, b: &RatInterval) -> Option<RatInterval> {
    let lo = a.lo.clone().max(b.lo.clone());
    let hi = a.hi.clone().min(b.hi.clone());
    (lo < hi).then(|| RatInterval::new(lo, hi))
}

/// Every root in the open window of level at most `n`, ascending.
pub(crate) fn enumerate(n: usize, window: &RatInterval) -> Result<Vec<ExactScalar>> {
    if n > 16 {
        return Err(Error::ResourceLimit(format!("enumeration at level {n}")));
    }
    let Some(w) = intersect(window, &domain()) else { return Ok(Vec::new()) };
    let mut out: Vec<ExactScalar> = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = vec![BigInt::zero()];
        let mut k = code;
        for _ in 0..n {
            c.push(BigInt::from((k % 3) as i64 - 1));
            k /= 3;
        }
        // p and -p have the same roots: keep the one with positive leading term
        let p = IntPolynomial::new(c);
        if p.leading().map_or(true, |l| l < &BigInt::zero()) {
            continue;
        }
        for r in roots_in(&p, &w)? {
            out.push(ExactScalar::from_algebraic(r));
        }
    }
    out.sort_by(|a, b| a.cmp_exact(b));
    out.dedup_by(|a, b| a.cmp_exact(b).is_eq());
    Ok(out)
}

/// Node cap of the small-polynomial exclusion.
const SMALL_POLY_NODES: u64 = 200_000_000;

/// True when `x` is not a root of any nonzero polynomial of degree at most
/// `deg` with coefficients in `{-2, .., 2}`.
///
/// Depth-first over coefficients from the constant term up: a prefix is cut
/// when its partial sum exceeds what the remaining powers can cancel.
/// Surviving complete polynomials are settled exactly.
pub(crate) fn avoids_small_polys(x: &AlgebraicNumber, deg: usize) -> Result<bool> {
    let xf = x.to_f64_interval();
    let pows: Vec<FInterval> = (0..=deg)
        .scan(FInterval::point(1.0), |acc, _| {
            let cur = *acc;
            *acc = *acc * xf;
            Some(cur)
        })
        .collect();
    // tail[k] bounds |sum_{i >= k} c_i x^i|
    let mut tail = vec![0.0f64; deg + 2];
    for i in (0..=deg).rev() {
        let m = pows[i].lo.abs().max(pows[i].hi.abs());
        tail[i] = ((tail[i + 1] + 2.0 * m) * (1.0 + 1e-12)).next_up();
    }
    struct Walk<'a> {
        x: &'a AlgebraicNumber,
        pows: &'a [FInterval],
        tail: &'a [f64],
        c: Vec<i64>,
        nodes: u64,
    }
    impl Walk<'_> {
        fn go(&mut self, k: usize, sum: FInterval) -> Result<bool> {
            self.nodes += 1;
            if self.nodes > SMALL_POLY_NODES {
                return Err(Error::ResourceLimit(format!("small-polynomial exclusion at degree {}", self.pows.len() - 1)));
            }
            if sum.lo > self.tail[k] || sum.hi < -self.tail[k] {
                return Ok(true);
            }
            if k == self.pows.len() {
                if self.c.iter().all(|v| *v == 0) || !sum.contains_zero() {
                    return Ok(true);
                }
                return Ok(self.x.sign_of(&IntPolynomial::from_i64(&self.c)) != 0);
            }
            // first nonzero coefficient positive: p and -p share roots
            let lead = self.c.iter().all(|v| *v == 0);
            for ci in if lead { 0..=2 } else { -2..=2 } {
                self.c.push(ci);
                let next = sum + FInterval::point(ci as f64) * self.pows[k];
                let ok = self.go(k + 1, next)?;
                self.c.pop();
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
    let mut w = Walk { x, pows: &pows, tail: &tail, c: Vec::with_capacity(deg + 1), nodes: 0 };
    w.go(0, FInterval::point(0.0))
}

/// Roots of `kappa(x) + s x^N` inside the open window, for `N = from, from+1, ..`
/// and `s = +1, -1`, in that order; `accept` picks the first survivor.
pub(crate) fn perturb(
    kappa: &IntPolynomial,
    center: &ExactScalar,
    eps: &BigRational,
    from: usize,
    n_cap: usize,
    mut accept: impl FnMut(&ExactScalar) -> Result<bool>,
) -> Result<ExactScalar> {
    // rational window inside (center - eps, center + eps)
    let mut bits = 64;
    let enc = loop {
        let e = center.enclose_bits(bits);
        if e.width() * BigInt::from(4) < *eps {
            break e;
        }
        bits *= 2;
    };
    let window = RatInterval::new(&enc.hi - eps, &enc.lo + eps);
    let Some(window) = intersect(&window, &domain()) else {
        return Err(Error::Domain("perturbation window leaves the domain".into()));
    };
    let deg = kappa.degree().unwrap_or(0);
    for n in from.max(deg + 1)..=n_cap {
        for s in [1i64, -1] {
            let mut c = vec![BigInt::zero(); n + 1];
            c[n] = BigInt::from(s);
            let p = kappa.add(&IntPolynomial::new(c));
            for r in roots_in(&p, &window)? {
                let x = ExactScalar::from_algebraic(r);
                if accept(&x)? {
                    return Ok(x);
                }
            }
        }
    }
    Err(Error::ResourceLimit(format!("no admissible root of degree up to {n_cap}")))
}

pub(crate) fn algebraic(x: &ExactScalar) -> AlgebraicNumber {
    match x.as_rational() {
        Some(r) => AlgebraicNumber::from_rational(r.clone()),
        None => x.to_algebraic(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> ExactScalar {
        let p = IntPolynomial::from_i64(&[-1, 1, 1]);
        let r = isolate_real_roots(&p, &domain()).unwrap();
        ExactScalar::from_algebraic(r[0].clone())
    }

    #[test]
    fn level_three_contains_golden() {
        let e = enumerate(3, &domain()).unwrap();
        assert!(e.iter().any(|x| x.cmp_exact(&golden()).is_eq()));
        assert!(enumerate(1, &domain()).unwrap().is_empty());
    }

    #[test]
    fn small_poly_exclusion() {
        assert!(!avoids_small_polys(&algebraic(&golden()), 2).unwrap());
        assert!(avoids_small_polys(&algebraic(&golden()), 1).unwrap());
        assert!(!avoids_small_polys(&AlgebraicNumber::from_rational(BigRational::new(1.into(), 2.into())), 1).unwrap());
        // deep enough for a second Example 2 stage
        assert!(!avoids_small_polys(&algebraic(&golden()), 13).unwrap());
    }

    fn avoids_by_enumeration(x: &AlgebraicNumber, deg: usize) -> bool {
        (0..5usize.pow(deg as u32 + 1)).all(|code| {
            let c: Vec<i64> = (0..=deg).map(|i| (code / 5usize.pow(i as u32) % 5) as i64 - 2).collect();
            c.iter().all(|v| *v == 0) || x.sign_of(&IntPolynomial::from_i64(&c)) != 0
        })
    }

    #[test]
    fn small_poly_exclusion_matches_enumeration() {
        let roots = [&[-1i64, 1, 0, 1][..], &[-1, 1, 1, 0, 0, 1], &[-1, 0, 1, 1], &[1, -2, 0, 2], &[-2, 1, 2]];
        for c in roots {
            for r in isolate_real_roots(&IntPolynomial::from_i64(c), &RatInterval::new(rat(-1, 1), rat(1, 1))).unwrap() {
                for deg in 1..=4 {
                    assert_eq!(avoids_small_polys(&r, deg).unwrap(), avoids_by_enumeration(&r, deg), "{c:?} at {deg}");
                }
            }
        }
    }

    #[test]
    fn witness_polynomial() {
        let w = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let p = witness_poly(&w(&["u1", "u2", "u2"]), &w(&["u2", "u1", "u1"])).unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[0, -1, 1, 1]));
        assert_eq!(algebraic(&golden()).sign_of(&p), 0);
    }
}
