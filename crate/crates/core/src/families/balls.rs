//! Certified statements about whole parameter balls.
//!
//! Inclusion: a witness pair stays within a distance bound on a closed ball.
//! Exclusion: no pair of words up to a level overlaps anywhere on a closed
//! box. Both work on the symbolic template, so they hold for every parameter
//! in the ball, not just sampled ones.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::template::{SymbolicPair, Template};
use crate::error::{Error, Result};
use crate::exactnum::transcendental::{bits_for, round_down, round_up};
use crate::exactnum::{ExactScalar, FInterval, MPoly, RatInterval};

/// Largest number of halvings before a radius search gives up.
pub const MAX_HALVINGS: u32 = 256;

/// A positive rational not above `x`; `x` itself when rational.
pub fn rational_below(x: &ExactScalar) -> Result<BigRational> {
    if x.sign() <= 0 {
        return Err(Error::InvalidInput(format!("{x} is not positive")));
    }
    if let Some(r) = x.as_rational() {
        return Ok(r.clone());
    }
    let mut bits = 64;
    loop {
        let lo = x.enclose_bits(bits).lo;
        if lo.is_positive() {
            return Ok(round_down(&lo, bits));
        }
        bits *= 2;
    }
}

/// A rational box containing the closed sup-norm ball of radius `r`.
pub fn box_around(center: &[ExactScalar], r: &BigRational) -> Vec<RatInterval> {
    let bits = bits_for(r) + 24;
    center
        .iter()
        .map(|c| match c.as_rational() {
            Some(x) => RatInterval::new(x - r, x + r),
            None => {
                let e = c.enclose_bits(bits);
                RatInterval::new(round_down(&(&e.lo - r), bits), round_up(&(&e.hi + r), bits))
            }
        })
        .collect()
}

/// Sum of absolute values of the degree-one coefficients.
fn linear_weight(f: &MPoly) -> BigRational {
    f.terms().filter(|(e, _)| e.iter().sum::<u32>() == 1).map(|(_, c)| c.abs()).sum()
}

/// Whether `sup_j |diff_j(q)| <= bound` for every `q` within `eps` of
/// `center`, with equal ratios throughout.
pub fn certify_inclusion(pair: &SymbolicPair, center: &[ExactScalar], eps: &BigRational, bound: &BigRational) -> bool {
    if !pair.same_ratio() {
        return false;
    }
    if pair.is_affine() {
        let bound = ExactScalar::from(bound.clone());
        return pair.diff.iter().all(|f| {
            let at = ExactScalar::eval_mpoly(f, center).abs();
            let reach = &at + &ExactScalar::from(eps * linear_weight(f));
            reach.cmp_exact(&bound).is_le()
        });
    }
    let bx = box_around(center, eps);
    pair.diff.iter().all(|f| {
        let iv = f.eval_interval(&bx);
        iv.lo >= -bound.clone() && &iv.hi <= bound
    })
}

/// The radius recorded for a witness: `min(outer/2, margin/2, bound/w)` when
/// the difference is affine with weight `w`, and otherwise the first of
/// `min(outer/2, margin/2) / 2^k` that certifies.
pub fn canonical_epsilon(
    pair: &SymbolicPair,
    center: &[ExactScalar],
    bound: &BigRational,
    outer: Option<&BigRational>,
    margin: &BigRational,
) -> Result<BigRational> {
    if !pair.same_ratio() {
        return Err(Error::InvalidInput("witness words have different ratios".into()));
    }
    let two = BigRational::from_integer(2.into());
    let mut cap = margin / &two;
    if let Some(o) = outer {
        cap = cap.min(o / &two);
    }
    if pair.is_affine() {
        if pair.diff.iter().any(|f| !ExactScalar::eval_mpoly(f, center).is_zero()) {
            return Err(Error::InvalidInput("witness does not overlap at the center".into()));
        }
        let w = pair.diff.iter().map(linear_weight).max().unwrap_or_else(BigRational::zero);
        return Ok(if w.is_zero() { cap } else { cap.min(bound / w) });
    }
    let mut eps = cap;
    for _ in 0..MAX_HALVINGS {
        if certify_inclusion(pair, center, &eps, bound) {
            return Ok(eps);
        }
        eps /= &two;
    }
    Err(Error::ResourceLimit("inclusion radius below 2^-256 of its start".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    eq: bool,
    pa: MPoly,
    pb: MPoly,
    d: Vec<MPoly>,
}

struct Exclusion<'a> {
    tpl: &'a Template,
    bx: Vec<RatInterval>,
    bf: Vec<FInterval>,
    tails: Vec<Vec<RatInterval>>,
    tails_f: Vec<Vec<FInterval>>,
    budget: u64,
    nodes: u64,
}

impl Exclusion<'_> {
    /// True when some completion of the node can vanish somewhere on the box.
    fn reachable(&self, n: &Node, rest: usize) -> bool {
        let (pa_f, pb_f) = (n.pa.eval_f(&self.bf), n.pb.eval_f(&self.bf));
        let mut exact = None;
        for (j, dj) in n.d.iter().enumerate() {
            let e = dj.eval_f(&self.bf) + pa_f * self.tails_f[rest][j] - pb_f * self.tails_f[rest][j];
            if !e.contains_zero() {
                return false;
            }
            let (pa, pb) = exact.get_or_insert_with(|| (n.pa.eval_interval(&self.bx), n.pb.eval_interval(&self.bx)));
            let t = &self.tails[rest][j];
            let e = dj.eval_interval(&self.bx) + &*pa * t - &*pb * t;
            if !e.contains_zero() {
                return false;
            }
        }
        true
    }

    fn child(&self, n: &Node, i: usize, k: usize) -> Node {
        let (mi, mk) = (&self.tpl.maps[i], &self.tpl.maps[k]);
        let d = n.d.iter().zip(mi.t.iter().zip(&mk.t)).map(|(d, (ti, tk))| d.add(&n.pa.mul(ti)).sub(&n.pb.mul(tk))).collect();
        Node { eq: n.eq && i == k, pa: n.pa.mul(&mi.ratio), pb: n.pb.mul(&mk.ratio), d }
    }

    /// Searches level `len`; true when some pair may overlap on the box.
    fn level(&mut self, len: usize) -> Result<bool> {
        let nv = self.tpl.nvars;
        let root =
            Node { eq: true, pa: MPoly::constant(nv, BigRational::one()), pb: MPoly::constant(nv, BigRational::one()), d: vec![MPoly::zero(nv); self.tpl.dim] };
        let mut frontier = vec![root];
        let m = self.tpl.maps.len();
        for depth in 1..=len {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for n in &frontier {
                for i in 0..m {
                    for k in 0..m {
                        if n.eq && k < i {
                            continue;
                        }
                        self.nodes += 1;
                        if self.nodes > self.budget {
                            return Err(Error::BudgetExceeded { budget: self.budget });
                        }
                        let c = self.child(n, i, k);
                        if !self.reachable(&c, len - depth) || seen.contains(&c) {
                            continue;
                        }
                        seen.insert(c.clone());
                        next.push(c);
                    }
                }
            }
            frontier = next;
        }
        for n in &frontier {
            if n.eq {
                continue;
            }
            if n.pa == n.pb || n.pa.sub(&n.pb).eval_interval(&self.bx).contains_zero() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Whether no two distinct words of length at most `l` overlap for any
/// parameter in the closed ball of radius `delta` around `center`.
pub fn certify_exclusion(tpl: &Template, center: &[ExactScalar], delta: &BigRational, l: usize, budget: u64) -> Result<bool> {
    if center.len() != tpl.nvars {
        return Err(Error::DimensionMismatch(tpl.nvars, center.len()));
    }
    let bx = box_around(center, delta);
    let bf: Vec<FInterval> = bx.iter().map(|b| b.to_f64()).collect();
    let bits = bits_for(delta) + 64;
    let ratios: Vec<RatInterval> = tpl.maps.iter().map(|m| m.ratio.eval_interval(&bx).round_out(bits)).collect();
    let trans: Vec<Vec<RatInterval>> =
        tpl.maps.iter().map(|m| m.t.iter().map(|t| t.eval_interval(&bx).round_out(bits)).collect()).collect();
    let zero = RatInterval::point(BigRational::zero());
    let mut tails = vec![vec![zero; tpl.dim]];
    for r in 1..=l {
        let prev = &tails[r - 1];
        let row: Vec<RatInterval> = (0..tpl.dim)
            .map(|j| {
                let mut hull: Option<RatInterval> = None;
                for (ri, ti) in ratios.iter().zip(&trans) {
                    let v = &ti[j] + &(ri * &prev[j]);
                    hull = Some(match hull {
                        None => v,
                        Some(h) => h.hull(&v),
                    });
                }
                hull.unwrap().round_out(bits)
            })
            .collect();
        tails.push(row);
    }
    let tails_f = tails.iter().map(|row| row.iter().map(|t| t.to_f64()).collect()).collect();
    let mut ex = Exclusion { tpl, bx, bf, tails, tails_f, budget, nodes: 0 };
    for len in 1..=l {
        if ex.level(len)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First of `start / 2^k` that certifies exclusion up to level `l`.
pub fn canonical_delta(tpl: &Template, center: &[ExactScalar], start: &BigRational, l: usize, budget: u64) -> Result<BigRational> {
    let mut delta = start.clone();
    for _ in 0..64 {
        if certify_exclusion(tpl, center, &delta, l, budget)? {
            return Ok(delta);
        }
        delta /= BigInt::from(2);
    }
    Err(Error::ResourceLimit("exclusion radius below 2^-64 of the container".into()))
}

/// Sup-norm slack of `point` inside the open balls `B(center_i, radius_i)`,
/// one ball per coordinate block.
pub fn container_gap(point: &[ExactScalar], balls: &[(&[ExactScalar], &BigRational)]) -> Result<ExactScalar> {
    let mut gap: Option<ExactScalar> = None;
    let mut offset = 0;
    for (c, r) in balls {
        for (j, cj) in c.iter().enumerate() {
            let x = point.get(offset + j).ok_or(Error::DimensionMismatch(offset + c.len(), point.len()))?;
            let g = &ExactScalar::from((*r).clone()) - &(x - cj).abs();
            gap = Some(match gap {
                None => g,
                Some(v) => v.min_exact(g),
            });
        }
        offset += c.len();
    }
    let gap = gap.ok_or_else(|| Error::InvalidInput("empty container".into()))?;
    if gap.sign() <= 0 {
        return Err(Error::InvalidInput("point is not inside its container".into()));
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;
    use crate::families::{example1, MergeChoice, Side};

    fn q(x: BigRational) -> ExactScalar {
        ExactScalar::from(x)
    }

    #[test]
    fn affine_radius_is_closed_form() {
        let tpl = example1::template(&rat(1, 2), 1, Side::U, MergeChoice::Union);
        // u = 1/2: lambda^2 * 1 - lambda u = 0 at level 2
        let w = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let pair = tpl.pair(&w(&["u", "0"]), &w(&["0", "1"])).unwrap();
        let c = [q(rat(1, 2))];
        assert!(ExactScalar::eval_mpoly(&pair.diff[0], &c).is_zero());
        let e = canonical_epsilon(&pair, &c, &rat(1, 64), Some(&rat(1, 1)), &rat(1, 1)).unwrap();
        assert_eq!(e, rat(1, 32));
        assert!(certify_inclusion(&pair, &c, &e, &rat(1, 64)));
        assert!(!certify_inclusion(&pair, &c, &(e * BigInt::from(2)), &rat(1, 64)));
        let e = canonical_epsilon(&pair, &c, &rat(1000, 1), Some(&rat(1, 5)), &rat(1, 1)).unwrap();
        assert_eq!(e, rat(1, 10));
    }

    #[test]
    fn exclusion_matches_line_distance() {
        // level-1 loci of the joint family are the digit coincidences
        // u = v, u = 1 + v, 1 + u = v, u = 1, v = 1
        let tpl = example1::template(&rat(1, 3), 1, Side::Joint, MergeChoice::Union);
        let c = [q(rat(2, 5)), q(rat(3, 10))];
        // sup-norm distance to u = v is |u - v| / 2 = 1/20
        assert!(certify_exclusion(&tpl, &c, &rat(1, 21), 1, 1_000_000).unwrap());
        assert!(!certify_exclusion(&tpl, &c, &rat(1, 20), 1, 1_000_000).unwrap());
        let d = canonical_delta(&tpl, &c, &rat(1, 8), 1, 1_000_000).unwrap();
        assert_eq!(d, rat(1, 32));
    }

    #[test]
    fn container_slack() {
        let p = [q(rat(1, 2)), q(rat(1, 3))];
        let (cu, cv) = ([q(rat(1, 2))], [q(rat(1, 4))]);
        let g = container_gap(&p, &[(&cu, &rat(1, 10)), (&cv, &rat(1, 10))]).unwrap();
        assert_eq!(g, q(rat(1, 60)));
    }
}
