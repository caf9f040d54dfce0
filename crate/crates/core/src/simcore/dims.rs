use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::map::{IFSInstance, SimilarityMap};
use crate::error::{Error, Result};
use crate::exactnum::charpoly_rat;
use crate::exactnum::transcendental::{bits_for, exp_interval, ln_interval, ln_rat, sqrt_interval};
use crate::exactnum::{isolate_real_roots, ExactScalar, IntPolynomial, RatInterval};

const MAX_BITS: u32 = 4096;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn positive_enclosure(x: &ExactScalar, bits: u32) -> RatInterval {
    x.enclose_bits(bits)
}

/// Enclosure of `||O - O'||_2` from the largest eigenvalue of `(O-O')^T (O-O')`.
fn orth_norm(f: &SimilarityMap, g: &SimilarityMap, bits: u32) -> RatInterval {
    let a = f.orth.to_matrix();
    let b = g.orth.to_matrix();
    let d = a.len();
    let diff: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| a[i][j] - b[i][j]).collect()).collect();
    if diff.iter().flatten().all(|&v| v == 0) {
        return RatInterval::point(BigRational::zero());
    }
    let m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| (0..d).map(|j| q((0..d).map(|k| diff[k][i] * diff[k][j]).sum())).collect())
        .collect();
    let cp = IntPolynomial::from_rational_coeffs(&charpoly_rat(m));
    let bound = cp.root_bound() + BigRational::one();
    let roots = isolate_real_roots(&cp, &RatInterval::new(-BigRational::one(), bound)).expect("nonzero charpoly");
    let top = roots.into_iter().max_by(|x, y| x.cmp_real(y)).expect("symmetric matrix has real eigenvalues");
    let w = BigRational::new(BigInt::one(), BigInt::one() << (2 * bits as usize + 4));
    let iv = top.refine(&w);
    let iv = RatInterval::new(iv.lo.max(BigRational::zero()), iv.hi);
    sqrt_interval(&iv, bits + 2)
}

/// Certified enclosure of `|t - t'|_2 + |log r - log r'| + ||O - O'||`, of
/// width at most `precision`.
pub fn dist_hochman(f: &SimilarityMap, g: &SimilarityMap, precision: &BigRational) -> RatInterval {
    assert!(precision.is_positive(), "precision must be positive");
    let mut bits = bits_for(precision) + 8;
    loop {
        let mut sq = RatInterval::point(BigRational::zero());
        for (a, b) in f.t.iter().zip(&g.t) {
            let d = (a - b).enclose_bits(2 * bits + 8);
            sq = sq + d.abs().pow(2);
        }
        let tn = sqrt_interval(&sq, bits + 4);
        let lr = ln_interval(&positive_enclosure(&f.ratio, bits + 16), bits + 4);
        let lg = ln_interval(&positive_enclosure(&g.ratio, bits + 16), bits + 4);
        let logs = (lr - lg).abs();
        let on = orth_norm(f, g, bits + 4);
        let total = tn + logs + on;
        if &total.width() <= precision || bits > MAX_BITS {
            return total;
        }
        bits += 32;
    }
}

/// Bisection for the unique root of a strictly monotone function given by
/// interval enclosures `eval(s, bits)`. `lo`/`hi` must bracket the root.
fn bisect(
    eval: impl Fn(&BigRational, u32) -> RatInterval,
    increasing: bool,
    mut lo: BigRational,
    mut hi: BigRational,
    tol: &BigRational,
) -> RatInterval {
    let base = bits_for(tol) + 16;
    let side = |s: &BigRational, bits: u32| -> Option<Ordering> {
        // Less: root is above s
        let v = eval(s, bits);
        match v.sign() {
            Some(1) => Some(if increasing { Ordering::Greater } else { Ordering::Less }),
            Some(-1) => Some(if increasing { Ordering::Less } else { Ordering::Greater }),
            Some(_) => Some(Ordering::Equal),
            None => None,
        }
    };
    let two = q(2);
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi) / &two;
        let mut bits = base;
        let mut res = None;
        while bits <= base + 256 {
            res = side(&mid, bits);
            if res.is_some() {
                break;
            }
            bits += 64;
        }
        match res {
            Some(Ordering::Less) => lo = mid,
            Some(Ordering::Greater) => hi = mid,
            Some(Ordering::Equal) => return RatInterval::point(mid),
            None => {
                // mid sits within rounding noise of the root: bracket it tightly
                let quarter = tol / q(4);
                let a = &mid - &quarter;
                let b = &mid + &quarter;
                if side(&a, base + 256) == Some(Ordering::Less) && side(&b, base + 256) == Some(Ordering::Greater) {
                    return RatInterval::new(a, b);
                }
                panic!("bisection failed to separate the root near {mid}");
            }
        }
    }
    RatInterval::new(lo, hi)
}

/// Enclosure of `ln r` for a ratio in `(0, 1)`.
fn ln_ratio(r: &ExactScalar, bits: u32) -> RatInterval {
    ln_interval(&positive_enclosure(r, bits + 8), bits)
}

fn scale_iv(a: &RatInterval, s: &BigRational) -> RatInterval {
    let x = &a.lo * s;
    let y = &a.hi * s;
    if x <= y {
        RatInterval::new(x, y)
    } else {
        RatInterval::new(y, x)
    }
}

/// Interval of width at most `tol` containing the unique `s >= 0` with
/// `sum r_i^s = 1`.
pub fn similarity_dimension(ifs: &IFSInstance, tol: &BigRational) -> RatInterval {
    assert!(tol.is_positive());
    let ratios: Vec<ExactScalar> = ifs.maps().iter().map(|(_, m)| m.ratio.clone()).collect();
    let f = |s: &BigRational, bits: u32| -> RatInterval {
        let mut acc = RatInterval::point(-BigRational::one());
        for r in &ratios {
            let l = ln_ratio(r, bits + 8);
            acc = acc + exp_interval(&scale_iv(&l, s), bits + 4);
        }
        acc
    };
    let mut hi = BigRational::one();
    while f(&hi, 32).sign() != Some(-1) {
        hi *= q(2);
    }
    bisect(f, false, BigRational::zero(), hi, tol)
}

/// Upper bounds for self-similar measures with weights `p`:
/// `min{(sum p log p) / (sum p log r), d}` and `min{T(q) / (q - 1), d}` where
/// `sum p_i^q r_i^(-T) = 1`.
pub fn dim_upper_bounds(
    ifs: &IFSInstance,
    p: &[BigRational],
    q_exp: &BigRational,
    tol: &BigRational,
) -> Result<(RatInterval, RatInterval)> {
    if p.len() != ifs.len() {
        return Err(Error::DimensionMismatch(ifs.len(), p.len()));
    }
    if p.iter().any(|x| !x.is_positive()) || p.iter().sum::<BigRational>() != BigRational::one() {
        return Err(Error::InvalidInput("weights must be positive and sum to 1".into()));
    }
    if q_exp <= &BigRational::one() {
        return Err(Error::InvalidInput("q must exceed 1".into()));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let d = q(ifs.dim() as i64);
    let ratios: Vec<ExactScalar> = ifs.maps().iter().map(|(_, m)| m.ratio.clone()).collect();
    let clip = |iv: RatInterval| RatInterval::new(iv.lo.clone().min(d.clone()), iv.hi.clone().min(d.clone()));

    let mut bits = bits_for(tol) + 8;
    let measure = loop {
        let mut num = RatInterval::point(BigRational::zero());
        let mut den = RatInterval::point(BigRational::zero());
        for (pi, r) in p.iter().zip(&ratios) {
            num = num + scale_iv(&ln_rat(pi, bits + 8), pi);
            den = den + scale_iv(&ln_ratio(r, bits + 8), pi);
        }
        // -num >= 0, -den > 0
        let a = -num;
        let b = -den;
        let iv = if a.lo.is_negative() {
            RatInterval::new(BigRational::zero(), &a.hi / &b.lo)
        } else {
            RatInterval::new(&a.lo / &b.hi, &a.hi / &b.lo)
        };
        let iv = clip(iv);
        if &iv.width() <= tol || bits > MAX_BITS {
            break iv;
        }
        bits += 32;
    };

    let qm1 = q_exp - BigRational::one();
    let weights = |bits: u32| -> Vec<RatInterval> {
        p.iter()
            .map(|pi| {
                if q_exp.is_integer() {
                    let k = q_exp.to_integer();
                    let k: u32 = k.try_into().expect("moderate exponent");
                    RatInterval::point(num_traits::pow::pow(pi.clone(), k as usize))
                } else {
                    exp_interval(&scale_iv(&ln_rat(pi, bits + 8), q_exp), bits + 4)
                }
            })
            .collect()
    };
    let g = |s: &BigRational, bits: u32| -> RatInterval {
        let w = weights(bits);
        let mut acc = RatInterval::point(-BigRational::one());
        for (wi, r) in w.iter().zip(&ratios) {
            let l = ln_ratio(r, bits + 8);
            acc = acc + wi.clone() * exp_interval(&scale_iv(&l, &-s.clone()), bits + 4);
        }
        acc
    };
    let mut hi = BigRational::one();
    while g(&hi, 32).sign() != Some(1) {
        hi *= q(2);
    }
    let t = bisect(g, true, BigRational::zero(), hi, &(tol * &qm1));
    let lq = clip(RatInterval::new(&t.lo / &qm1, &t.hi / &qm1));
    Ok((measure, lq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;
    use crate::simcore::{perm::SignedPermutation, SimilarityMap};
    use num_traits::ToPrimitive;

    fn ifs(rs: &[(i64, i64)]) -> IFSInstance {
        IFSInstance::new(
            1,
            rs.iter()
                .enumerate()
                .map(|(i, &(n, d))| {
                    (format!("m{i}"), SimilarityMap::affine(rat(n, d).into(), rat(i as i64, 1).into()).unwrap())
                })
                .collect(),
        )
        .unwrap()
    }

    fn contains_f(iv: &RatInterval, x: f64, slack: f64) -> bool {
        iv.lo.to_f64().unwrap() <= x + slack && x - slack <= iv.hi.to_f64().unwrap()
    }

    #[test]
    fn similarity_dimension_examples() {
        let tol = rat(1, 1_000_000_000);
        let d = similarity_dimension(&ifs(&[(1, 2), (1, 2)]), &tol);
        assert!(d.contains(&rat(1, 1)) && d.width() <= tol);
        let d = similarity_dimension(&ifs(&[(1, 3), (1, 3)]), &tol);
        assert!(contains_f(&d, 2f64.ln() / 3f64.ln(), 1e-15));
        assert!(d.width() <= tol);
        let d = similarity_dimension(&ifs(&[(1, 2), (1, 2), (1, 2), (1, 2)]), &tol);
        assert!(d.contains(&rat(2, 1)));
    }

    #[test]
    fn upper_bound_examples() {
        let half = rat(1, 2);
        let tol = rat(1, 1_000_000);
        let (m, _) = dim_upper_bounds(&ifs(&[(1, 3), (1, 3)]), &[half.clone(), half.clone()], &rat(2, 1), &tol).unwrap();
        assert!(contains_f(&m, 2f64.ln() / 3f64.ln(), 1e-12));
        let (_, lq) = dim_upper_bounds(&ifs(&[(1, 2), (1, 2)]), &[half.clone(), half.clone()], &rat(2, 1), &tol).unwrap();
        assert!(lq.contains(&rat(1, 1)));
        assert!(dim_upper_bounds(&ifs(&[(1, 2), (1, 2)]), &[rat(1, 1), rat(0, 1)], &rat(2, 1), &tol).is_err());
    }

    #[test]
    fn hochman_examples() {
        let prec = rat(1, 1_000_000);
        let f = SimilarityMap::affine(rat(1, 2).into(), rat(0, 1).into()).unwrap();
        let g = SimilarityMap::affine(rat(1, 2).into(), rat(1, 1).into()).unwrap();
        let h = SimilarityMap::affine(rat(1, 4).into(), rat(0, 1).into()).unwrap();
        let z = dist_hochman(&f, &f, &prec);
        assert!(z.contains(&rat(0, 1)) && z.width() <= prec);
        assert!(dist_hochman(&f, &g, &prec).contains(&rat(1, 1)));
        assert!(contains_f(&dist_hochman(&f, &h, &prec), 2f64.ln(), 1e-12));
        // a reflection against the identity has operator-norm distance 2
        let a = SimilarityMap::new(rat(1, 2).into(), SignedPermutation::identity(2), vec![ExactScalar::zero(); 2]).unwrap();
        let b = SimilarityMap::new(
            rat(1, 2).into(),
            SignedPermutation::new(vec![0, 1], vec![-1, 1]).unwrap(),
            vec![ExactScalar::zero(); 2],
        )
        .unwrap();
        assert!(dist_hochman(&a, &b, &prec).contains(&rat(2, 1)));
    }

    #[test]
    fn hochman_nesting() {
        let f = SimilarityMap::affine(rat(2, 5).into(), rat(1, 3).into()).unwrap();
        let g = SimilarityMap::affine(rat(1, 3).into(), rat(-1, 7).into()).unwrap();
        let coarse = dist_hochman(&f, &g, &rat(1, 1000));
        let fine = dist_hochman(&f, &g, &rat(1, 4000));
        assert!(coarse.lo <= fine.lo && fine.hi <= coarse.hi || coarse.contains(&fine.mid()));
    }
}
