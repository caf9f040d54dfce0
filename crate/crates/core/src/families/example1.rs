//! Maps `lambda (x + a)` whose digits `a` are formal sums of `1`, `u_j` and
//! `v_j` per coordinate.
//!
//! Two words of length `n` overlap iff in some coordinate
//! `sum_i lambda^i (kappa_i + delta_i u_j) = 0` with digit differences in
//! `{-1, 0, 1}`. For `lambda = p/q <= 1/2` a nonzero digit sequence has a
//! nonzero value (the leading term dominates the tail), so `delta = 0` forces
//! `kappa = 0` and an overlap exists iff `u_j = m1 / m2` with `m1, m2` in
//! `M_n = { sum_i kappa_i p^i q^(n-i) }`. For `lambda = 1/2` and `1/3`,
//! `M_n` is every integer of absolute value at most `R_n = 2^n - 1`, resp.
//! `(3^n - 1) / 2` (signed binary, balanced ternary), so a reduced fraction
//! `P/Q` has level `min { n : max(|P|, Q) <= R_n }`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::template::{MapTemplate, Template};
use super::{MergeChoice, Side};
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, MPoly, RatInterval};
use crate::simcore::Word;

/// Largest `n` for which `M_n` is tabulated when it is not an integer range.
pub const TABLE_CAP: usize = 13;

type Table = Arc<HashMap<BigInt, Vec<i8>>>;

fn table_cache() -> &'static Mutex<HashMap<(BigInt, BigInt, usize), Table>> {
    static CACHE: OnceLock<Mutex<HashMap<(BigInt, BigInt, usize), Table>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda {
    p: BigInt,
    q: BigInt,
}

impl Lambda {
    pub fn new(l: &BigRational) -> Result<Self> {
        if !l.is_positive() || l * BigInt::from(2) > BigRational::one() {
            return Err(Error::InvalidInput(format!("contraction {l} must lie in (0, 1/2]")));
        }
        Ok(Lambda { p: l.numer().clone(), q: l.denom().clone() })
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    fn dense_base(&self) -> Option<u32> {
        if self.p.is_one() {
            self.q.to_u32().filter(|b| *b == 2 || *b == 3)
        } else {
            None
        }
    }

    fn radius(base: u32, n: usize) -> BigInt {
        let b = num_traits::pow(BigInt::from(base), n);
        if base == 2 {
            b - 1
        } else {
            (b - 1) / 2
        }
    }

    fn table(&self, n: usize) -> Result<Table> {
        if n > TABLE_CAP {
            return Err(Error::ResourceLimit(format!("digit table for lambda = {} beyond level {TABLE_CAP}", self.value())));
        }
        let key = (self.p.clone(), self.q.clone(), n);
        if let Some(t) = table_cache().lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let weights: Vec<BigInt> =
            (1..=n).map(|i| num_traits::pow(self.p.clone(), i) * num_traits::pow(self.q.clone(), n - i)).collect();
        let mut map: HashMap<BigInt, Vec<i8>> = HashMap::new();
        map.insert(BigInt::zero(), Vec::new());
        for w in &weights {
            let mut next = HashMap::with_capacity(map.len() * 3);
            for (m, ds) in &map {
                for d in [-1i8, 0, 1] {
                    let mut e = ds.clone();
                    e.push(d);
                    next.entry(m + w * BigInt::from(d)).or_insert(e);
                }
            }
            map = next;
        }
        let t = Arc::new(map);
        table_cache().lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    pub fn contains(&self, m: &BigInt, n: usize) -> Result<bool> {
        match self.dense_base() {
            Some(b) => Ok(m.abs() <= Self::radius(b, n)),
            None => Ok(self.table(n)?.contains_key(m)),
        }
    }

    /// Digits `kappa_1..kappa_n` with `sum kappa_i p^i q^(n-i) = m`.
    pub fn digits(&self, m: &BigInt, n: usize) -> Result<Vec<i8>> {
        let bad = || Error::InvalidInput(format!("{m} has no digit expansion of length {n}"));
        let Some(base) = self.dense_base() else {
            return self.table(n)?.get(m).cloned().ok_or_else(bad);
        };
        if m.abs() > Self::radius(base, n) {
            return Err(bad());
        }
        let b = BigInt::from(base);
        let mut rest = m.clone();
        let mut out = Vec::with_capacity(n);
        while !rest.is_zero() {
            let r = rest.mod_floor(&b).to_i8().unwrap();
            let d = match (base, r) {
                (2, 1) if rest.is_negative() => -1,
                (3, 2) => -1,
                _ => r,
            };
            out.push(d);
            rest = (rest - BigInt::from(d)) / &b;
        }
        out.resize(n, 0);
        out.reverse();
        Ok(out)
    }

    /// All of `M_n`, ascending.
    pub fn members(&self, n: usize) -> Result<Vec<BigInt>> {
        let mut v: Vec<BigInt> = match self.dense_base() {
            Some(b) => {
                let r = Self::radius(b, n).to_i64().ok_or_else(|| Error::ResourceLimit("digit range too large".into()))?;
                (-r..=r).map(BigInt::from).collect()
            }
            None => self.table(n)?.keys().cloned().collect(),
        };
        v.sort();
        Ok(v)
    }

    /// `(m1, m2)` in `M_n` with `m1 / m2 = x` and `m2 > 0` minimal.
    pub fn represent(&self, x: &BigRational, n: usize) -> Result<Option<(BigInt, BigInt)>> {
        let (pn, qd) = (x.numer(), x.denom());
        if self.dense_base().is_some() {
            let ok = self.contains(pn, n)? && self.contains(qd, n)?;
            return Ok(ok.then(|| (pn.clone(), qd.clone())));
        }
        let table = self.table(n)?;
        let mut dens: Vec<&BigInt> = table.keys().filter(|m| m.is_positive() && m.is_multiple_of(qd)).collect();
        dens.sort();
        for m2 in dens {
            let m1 = pn * (m2 / qd);
            if table.contains_key(&m1) {
                return Ok(Some((m1, m2.clone())));
            }
        }
        Ok(None)
    }

    /// Least `n <= n_max` with `x` a ratio of two members of `M_n`.
    pub fn level(&self, x: &BigRational, n_max: usize) -> Result<Option<usize>> {
        if x.is_zero() {
            return Err(Error::Domain("coordinate 0".into()));
        }
        if let Some(b) = self.dense_base() {
            let h = x.numer().abs().max(x.denom().clone());
            // R_n >= b^(n-1), so start just below log_b(h)
            let est = (h.bits() as f64 - 1.0) / (b as f64).log2();
            let mut n = (est.floor() as usize).saturating_sub(1).max(1);
            while n <= n_max {
                if h <= Self::radius(b, n) {
                    return Ok(Some(n));
                }
                n += 1;
            }
            return Ok(None);
        }
        for n in 1..=n_max {
            if self.represent(x, n)?.is_some() {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Digit {
    one: bool,
    u: bool,
    v: bool,
}

const ZERO: Digit = Digit { one: false, u: false, v: false };

fn digit_label(d: Digit, j: usize, dim: usize) -> String {
    let idx = if dim == 1 { String::new() } else { (j + 1).to_string() };
    let mut parts = Vec::new();
    if d.one {
        parts.push("1".to_string());
    }
    if d.u {
        parts.push(format!("u{idx}"));
    }
    if d.v {
        parts.push(format!("v{idx}"));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

fn tuple_label(t: &[Digit]) -> String {
    t.iter().enumerate().map(|(j, d)| digit_label(*d, j, t.len())).collect::<Vec<_>>().join(",")
}

fn side_digits(side: Side, merge: MergeChoice) -> Vec<Digit> {
    let d = |one, u, v| Digit { one, u, v };
    match (side, merge) {
        (Side::U, _) => vec![d(false, false, false), d(true, false, false), d(false, true, false), d(true, true, false)],
        (Side::V, _) => vec![d(false, false, false), d(true, false, false), d(false, false, true), d(true, false, true)],
        (Side::Joint, _) => (0..8).map(|i| d(i & 1 != 0, i & 2 != 0, i & 4 != 0)).collect(),
    }
}

fn product(digits: &[Digit], dim: usize) -> Vec<Vec<Digit>> {
    let mut out: Vec<Vec<Digit>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out.iter().flat_map(|t| digits.iter().map(move |d| [t.clone(), vec![*d]].concat())).collect();
    }
    out
}

fn digit_tuples(dim: usize, side: Side, merge: MergeChoice) -> Vec<Vec<Digit>> {
    match (side, merge) {
        (Side::Joint, MergeChoice::Union) => {
            let mut all = product(&side_digits(Side::U, merge), dim);
            for t in product(&side_digits(Side::V, merge), dim) {
                if !all.contains(&t) {
                    all.push(t);
                }
            }
            all
        }
        _ => product(&side_digits(side, merge), dim),
    }
}

pub(crate) fn template(lambda: &BigRational, dim: usize, side: Side, merge: MergeChoice) -> Template {
    let nvars = if side == Side::Joint { 2 * dim } else { dim };
    let (u_off, v_off) = match side {
        Side::U => (Some(0), None),
        Side::V => (None, Some(0)),
        Side::Joint => (Some(0), Some(dim)),
    };
    let maps = digit_tuples(dim, side, merge)
        .into_iter()
        .map(|tuple| {
            let t = tuple
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let mut a = MPoly::zero(nvars);
                    if d.one {
                        a = a.add(&MPoly::constant(nvars, BigRational::one()));
                    }
                    if d.u {
                        a = a.add(&MPoly::var(nvars, u_off.unwrap() + j));
                    }
                    if d.v {
                        a = a.add(&MPoly::var(nvars, v_off.unwrap() + j));
                    }
                    a.scale(lambda)
                })
                .collect();
            MapTemplate { label: tuple_label(&tuple), ratio: MPoly::constant(nvars, lambda.clone()), t }
        })
        .collect();
    Template { nvars, dim, maps }
}

/// Word pair realising `kappa + delta x_j = 0` in coordinate `j`, digits
/// given most significant first.
pub(crate) fn witness_words(kappa: &[i8], delta: &[i8], j: usize, dim: usize, side: Side) -> (Word, Word) {
    let letter = |k: i8, d: i8| {
        let mut t = vec![ZERO; dim];
        t[j] = Digit { one: k > 0, u: side != Side::V && d > 0, v: side == Side::V && d > 0 };
        tuple_label(&t)
    };
    let a = kappa.iter().zip(delta).map(|(&k, &d)| letter(k, d)).collect();
    let b = kappa.iter().zip(delta).map(|(&k, &d)| letter(-k, -d)).collect();
    (a, b)
}

/// Least level of a point over all coordinates, with the overlapping words.
pub(crate) struct PointLevel {
    pub level: usize,
    pub a: Word,
    pub b: Word,
}

pub(crate) fn point_level(lam: &Lambda, side: Side, point: &[ExactScalar], n_max: usize) -> Result<Option<PointLevel>> {
    let dim = point.len();
    let mut best: Option<(usize, usize, BigRational)> = None;
    for (j, x) in point.iter().enumerate() {
        // Irrational coordinates are never a ratio of two rationals.
        let Some(r) = x.as_rational() else { continue };
        let cap = best.as_ref().map_or(n_max, |b| b.0 - 1);
        if cap == 0 {
            break;
        }
        if let Some(n) = lam.level(r, cap)? {
            best = Some((n, j, r.clone()));
        }
    }
    let Some((n, j, r)) = best else { return Ok(None) };
    let (m1, m2) = lam.represent(&r, n)?.expect("level implies a representation");
    let kappa = lam.digits(&-m1, n)?;
    let delta = lam.digits(&m2, n)?;
    let (a, b) = witness_words(&kappa, &delta, j, dim, side);
    Ok(Some(PointLevel { level: n, a, b }))
}

/// Every coordinate value `m1 / m2` of level at most `n` inside the open
/// window, excluding the domain points 0 and 1.
pub(crate) fn enumerate(lam: &Lambda, n: usize, window: &RatInterval) -> Result<Vec<BigRational>> {
    let members = lam.members(n)?;
    if (members.len() as u128).pow(2) > 400_000_000 {
        return Err(Error::ResourceLimit(format!("enumeration at level {n}")));
    }
    let mut out = Vec::new();
    for m2 in members.iter().filter(|m| m.is_positive()) {
        for m1 in members.iter().filter(|m| !m.is_zero()) {
            let x = BigRational::new(m1.clone(), m2.clone());
            if x.is_one() || &x <= &window.lo || &x >= &window.hi {
                continue;
            }
            out.push(x);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Distance from the excluded points 0 and 1.
pub(crate) fn domain_margin(point: &[ExactScalar]) -> Result<ExactScalar> {
    let mut m: Option<ExactScalar> = None;
    for x in point {
        let d = x.abs().min_exact((x - &ExactScalar::one()).abs());
        if d.is_zero() {
            return Err(Error::Domain(format!("coordinate {x} is 0 or 1")));
        }
        m = Some(match m {
            None => d,
            Some(m) => m.min_exact(d),
        });
    }
    m.ok_or_else(|| Error::InvalidInput("empty parameter point".into()))
}

/// Shifts coordinate `j` by `lambda^N q^L / den_j` for the least `N` that
/// keeps every shift below `eps`, stays in the domain and passes `accept`.
pub(crate) fn shift_search(
    lam: &Lambda,
    point: &[BigRational],
    dens: &[(usize, BigInt)],
    l: usize,
    eps: &BigRational,
    n_cap: usize,
    mut accept: impl FnMut(&[BigRational]) -> Result<bool>,
) -> Result<Vec<BigRational>> {
    let ql = BigRational::from_integer(num_traits::pow(lam.q.clone(), l));
    // every shift is below eps from this exponent on; skip straight there
    let lf = lam.value().to_f64().unwrap().log2();
    let need = dens
        .iter()
        .map(|(_, d)| {
            let room = log2_abs(eps) + log2_abs(&BigRational::from_integer(d.clone())) - log2_abs(&ql);
            (room / lf).floor() - 2.0
        })
        .fold(1.0f64, f64::max);
    if need > n_cap as f64 {
        return Err(Error::ResourceLimit(format!("perturbation needs exponent about {need:.0} > cap {n_cap}")));
    }
    let start = need as usize;
    let mut lam_n = num_traits::pow(lam.value(), start - 1);
    for _ in start..=n_cap {
        lam_n *= lam.value();
        let mut cand = point.to_vec();
        let mut ok = true;
        for (j, den) in dens {
            let shift = &lam_n * &ql / BigRational::from_integer(den.clone());
            if &shift.abs() >= eps {
                ok = false;
                break;
            }
            cand[*j] += shift;
            if cand[*j].is_zero() || cand[*j].is_one() {
                ok = false;
                break;
            }
        }
        if ok && accept(&cand)? {
            return Ok(cand);
        }
    }
    Err(Error::ResourceLimit(format!("no admissible perturbation with exponent up to {n_cap}")))
}

fn log2_abs(x: &BigRational) -> f64 {
    let (n, d) = (x.numer().abs(), x.denom().clone());
    let lb = |v: &BigInt| {
        let b = v.bits();
        let sh = b.saturating_sub(60);
        (v >> sh).to_f64().unwrap().log2() + sh as f64
    };
    lb(&n) - lb(&d)
}

/// Representation `m_gamma v - m_delta u = m_kappa` in `M_l` with
/// `m_gamma > 0`, for a coordinate tied to `u` at level `l`.
pub(crate) fn joint_representation(lam: &Lambda, u: &BigRational, v: &BigRational, l: usize) -> Result<Option<BigInt>> {
    let members = lam.members(l)?;
    if (members.len() as u128).pow(2) > 100_000_000 {
        return Err(Error::ResourceLimit(format!("joint representation search at level {l}")));
    }
    let mut gammas: Vec<&BigInt> = members.iter().filter(|m| m.is_positive()).collect();
    gammas.sort();
    for g in gammas {
        let gv = v * BigRational::from_integer(g.clone());
        for d in &members {
            let k = &gv - u * BigRational::from_integer(d.clone());
            if k.is_integer() && lam.contains(&k.to_integer(), l)? {
                return Ok(Some(g.clone()));
            }
        }
    }
    Ok(None)
}

pub(crate) fn rationals(point: &[ExactScalar]) -> Result<Vec<BigRational>> {
    point
        .iter()
        .map(|x| x.as_rational().cloned().ok_or_else(|| Error::Unsupported("perturbation of irrational coordinates".into())))
        .collect()
}
