//! `ExactScalar`: a rational, or a polynomial expression in finitely many
//! real algebraic generators reduced modulo their defining polynomials.
//!
//! Signs are always decided exactly. A float interval filter and rational
//! interval refinement settle the common (nonzero) case; zero is only ever
//! confirmed algebraically, through `gcd` with the defining polynomial for a
//! single generator or through a square-free annihilator otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebraic::AlgebraicNumber;
use super::interval::{FInterval, RatInterval};
use super::mpoly::MPoly;
use super::poly::{IntPolynomial, QPoly};
use crate::error::{Error, Result};

pub type Generator = Arc<AlgebraicNumber>;

/// Element of `Q[x_1..x_k] / (p_1(x_1), .., p_k(x_k))` evaluated at the
/// generators. Never constant (constants are stored as `ExactScalar::Rat`).
#[derive(Clone, Debug)]
pub struct FieldElem {
    gens: Arc<Vec<Generator>>,
    poly: MPoly,
}

impl PartialEq for FieldElem {
    fn eq(&self, o: &Self) -> bool {
        self.poly == o.poly && (Arc::ptr_eq(&self.gens, &o.gens) || self.gens == o.gens)
    }
}
impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, h: &mut H) {
        for g in self.gens.iter() {
            g.hash(h);
        }
        self.poly.hash(h);
    }
}

impl FieldElem {
    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }
}

#[derive(Clone)]
pub enum ExactScalar {
    Rat(BigRational),
    Alg(Arc<FieldElem>),
}

/// Structural key for deduplication. Equal keys imply equal values; the
/// converse can fail for algebraic values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKey {
    Rat(BigRational),
    Alg(Arc<FieldElem>),
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_algebraic(a: AlgebraicNumber) -> Self {
        if let Some(r) = a.as_rational() {
            return ExactScalar::Rat(r);
        }
        let gens = Arc::new(vec![Arc::new(a)]);
        ExactScalar::Alg(Arc::new(FieldElem { gens, poly: MPoly::var(1, 0) }))
    }

    pub fn generator(g: Generator) -> Self {
        if let Some(r) = g.as_rational() {
            return ExactScalar::Rat(r);
        }
        ExactScalar::Alg(Arc::new(FieldElem { gens: Arc::new(vec![g]), poly: MPoly::var(1, 0) }))
    }

    /// Builds `poly(gens)` with reduction; `gens` must be sorted and unique.
    fn from_parts(gens: Arc<Vec<Generator>>, poly: MPoly) -> Self {
        let poly = reduce(&gens, poly);
        match poly.as_constant() {
            Some(c) => ExactScalar::Rat(c),
            None => ExactScalar::Alg(Arc::new(FieldElem { gens, poly })),
        }
    }

    /// Evaluates a polynomial at exact arguments.
    pub fn eval_mpoly(p: &MPoly, args: &[ExactScalar]) -> ExactScalar {
        assert_eq!(p.nvars(), args.len());
        let mut acc = ExactScalar::zero();
        let mut pows: Vec<Vec<ExactScalar>> = args.iter().map(|a| vec![ExactScalar::one(), a.clone()]).collect();
        for (e, c) in p.terms() {
            let mut t = ExactScalar::Rat(c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                if k == 0 {
                    continue;
                }
                while pows[i].len() <= k {
                    let next = pows[i].last().unwrap() * &args[i];
                    pows[i].push(next);
                }
                t = &t * &pows[i][k];
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactScalar::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rat(r) => Some(r),
            ExactScalar::Alg(_) => None,
        }
    }

    pub fn key(&self) -> ScalarKey {
        match self {
            ExactScalar::Rat(r) => ScalarKey::Rat(r.clone()),
            ExactScalar::Alg(f) => ScalarKey::Alg(f.clone()),
        }
    }

    /// Certified enclosure of width roughly `2^-bits` (exact for rationals).
    pub fn enclose_bits(&self, bits: u32) -> RatInterval {
        match self {
            ExactScalar::Rat(r) => RatInterval::point(r.clone()),
            ExactScalar::Alg(f) => {
                let xs: Vec<RatInterval> = f.gens.iter().map(|g| g.enclose_bits(bits + 8)).collect();
                f.poly.eval_interval(&xs)
            }
        }
    }

    /// Enclosure of width at most `w`.
    pub fn enclose_width(&self, w: &BigRational) -> RatInterval {
        let mut bits = 32;
        loop {
            let iv = self.enclose_bits(bits);
            if &iv.width() <= w {
                return iv;
            }
            bits *= 2;
        }
    }

    pub fn to_f64_interval(&self) -> FInterval {
        match self {
            ExactScalar::Rat(r) => RatInterval::point(r.clone()).to_f64(),
            ExactScalar::Alg(f) => {
                let xs: Vec<FInterval> = f.gens.iter().map(|g| g.to_f64_interval()).collect();
                let v = f.poly.eval_f(&xs);
                if v.is_finite() {
                    v
                } else {
                    self.enclose_bits(64).to_f64()
                }
            }
        }
    }

    /// Nearest-ish float, for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactScalar::Alg(_) => {
                let iv = self.enclose_bits(64);
                iv.mid().to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    /// Exact sign.
    pub fn sign(&self) -> i8 {
        match self {
            ExactScalar::Rat(r) => sign_rat(r),
            ExactScalar::Alg(f) => sign_field(f),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    pub fn abs(&self) -> ExactScalar {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn cmp_exact(&self, o: &ExactScalar) -> Ordering {
        if let (ExactScalar::Rat(a), ExactScalar::Rat(b)) = (self, o) {
            return a.cmp(b);
        }
        let fa = self.to_f64_interval();
        let fb = o.to_f64_interval();
        if fa.hi < fb.lo {
            return Ordering::Less;
        }
        if fa.lo > fb.hi {
            return Ordering::Greater;
        }
        match (self - o).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn max_exact(self, o: ExactScalar) -> ExactScalar {
        if self.cmp_exact(&o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn min_exact(self, o: ExactScalar) -> ExactScalar {
        if self.cmp_exact(&o) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    pub fn pow(&self, n: u32) -> ExactScalar {
        let mut base = self.clone();
        let mut acc = ExactScalar::one();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<ExactScalar> {
        match self {
            ExactScalar::Rat(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(ExactScalar::Rat(r.recip()))
                }
            }
            ExactScalar::Alg(f) => {
                if sign_field(f) == 0 {
                    return Err(Error::DivisionByZero);
                }
                // C(e) = 0 with C(0) != 0 gives e^-1 = -(sum_{i>=1} c_i e^(i-1)) / c_0
                let mut c = charpoly_of(f);
                while c.first().is_some_and(|v| v.is_zero()) {
                    c.remove(0);
                }
                let c0 = c[0].clone();
                let mut acc = ExactScalar::zero();
                let e = ExactScalar::Alg(f.clone());
                for ci in c[1..].iter().rev() {
                    acc = &(&acc * &e) + &ExactScalar::Rat(ci.clone());
                }
                Ok(&acc * &ExactScalar::Rat(-c0.recip()))
            }
        }
    }

    pub fn checked_div(&self, o: &ExactScalar) -> Result<ExactScalar> {
        Ok(self * &o.inv()?)
    }

    /// A real algebraic number equal to this value.
    pub fn to_algebraic(&self) -> AlgebraicNumber {
        match self {
            ExactScalar::Rat(r) => AlgebraicNumber::from_rational(r.clone()),
            ExactScalar::Alg(f) => {
                if f.gens.len() == 1 && f.poly == MPoly::var(1, 0) {
                    return (*f.gens[0]).clone();
                }
                let ann = IntPolynomial::from_rational_coeffs(&charpoly_of(f)).square_free_part();
                let st = ann.sturm_sequence();
                let mut bits = 32;
                loop {
                    let iv = self.enclose_bits(bits);
                    if iv.lo < iv.hi
                        && ann.sign_at(&iv.lo) != 0
                        && ann.sign_at(&iv.hi) != 0
                        && st.count_open(&iv.lo, &iv.hi) == 1
                    {
                        return AlgebraicNumber::new(ann, iv).expect("isolating interval");
                    }
                    if iv.lo == iv.hi {
                        return AlgebraicNumber::from_rational(iv.lo);
                    }
                    bits *= 2;
                }
            }
        }
    }
}

fn sign_rat(r: &BigRational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_field(f: &FieldElem) -> i8 {
    let xs: Vec<FInterval> = f.gens.iter().map(|g| g.to_f64_interval()).collect();
    let v = f.poly.eval_f(&xs);
    if v.lo > 0.0 {
        return 1;
    }
    if v.hi < 0.0 {
        return -1;
    }
    let e = ExactScalar::Alg(Arc::new(f.clone()));
    for bits in [128u32, 512] {
        if let Some(s) = e.enclose_bits(bits).sign() {
            if s != 0 {
                return s;
            }
        }
    }
    if f.gens.len() == 1 {
        let p = IntPolynomial::from_rational_coeffs(&f.poly.univariate_coeffs());
        return f.gens[0].sign_of(&p);
    }
    let ann = IntPolynomial::from_rational_coeffs(&charpoly_of(f)).square_free_part();
    let zero_root = ann.sign_at(&BigRational::zero()) == 0;
    let st = ann.sturm_sequence();
    let mut bits = 1024;
    loop {
        let iv = e.enclose_bits(bits);
        if let Some(s) = iv.sign() {
            if s != 0 {
                return s;
            }
        }
        if zero_root && st.count_closed(&iv.lo, &iv.hi) == 1 {
            return 0;
        }
        bits *= 2;
    }
}

/// Reduces every variable modulo its generator's defining polynomial.
fn reduce(gens: &[Generator], poly: MPoly) -> MPoly {
    let n = gens.len();
    let mut poly = poly;
    for (i, g) in gens.iter().enumerate() {
        let d = g.degree() as u32;
        if poly.degree_in(i) < d {
            continue;
        }
        let modulus = QPoly::from_int(g.defining());
        let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<BigRational>> = Default::default();
        for (e, c) in poly.take_terms() {
            let k = e[i] as usize;
            let mut rest = e;
            rest[i] = 0;
            let v = groups.entry(rest).or_default();
            if v.len() <= k {
                v.resize(k + 1, BigRational::zero());
            }
            v[k] += c;
        }
        let mut out = MPoly::zero(n);
        for (rest, coeffs) in groups {
            let r = QPoly::new(coeffs).rem(&modulus);
            for (k, c) in r.0.into_iter().enumerate() {
                let mut e = rest.clone();
                e[i] = k as u32;
                out.add_term(e, c);
            }
        }
        poly = out;
    }
    poly
}

/// Aligns two operands over a common sorted generator list.
fn align(a: &ExactScalar, b: &ExactScalar) -> (Arc<Vec<Generator>>, MPoly, MPoly) {
    let lift = |x: &ExactScalar, gens: &Arc<Vec<Generator>>| -> MPoly {
        match x {
            ExactScalar::Rat(r) => MPoly::constant(gens.len(), r.clone()),
            ExactScalar::Alg(f) => {
                if Arc::ptr_eq(&f.gens, gens) || *f.gens == **gens {
                    f.poly.clone()
                } else {
                    let map: Vec<usize> =
                        f.gens.iter().map(|g| gens.binary_search(g).expect("generator present")).collect();
                    f.poly.remap(gens.len(), &map)
                }
            }
        }
    };
    let gens = match (a, b) {
        (ExactScalar::Alg(f), ExactScalar::Rat(_)) => f.gens.clone(),
        (ExactScalar::Rat(_), ExactScalar::Alg(f)) => f.gens.clone(),
        (ExactScalar::Alg(f), ExactScalar::Alg(g)) => {
            if Arc::ptr_eq(&f.gens, &g.gens) || f.gens == g.gens {
                f.gens.clone()
            } else {
                let mut v: Vec<Generator> = f.gens.iter().chain(g.gens.iter()).cloned().collect();
                v.sort();
                v.dedup();
                Arc::new(v)
            }
        }
        _ => unreachable!("rational pairs are handled directly"),
    };
    let pa = lift(a, &gens);
    let pb = lift(b, &gens);
    (gens, pa, pb)
}

/// Characteristic polynomial (monic, constant first) of multiplication by
/// `f` on the quotient algebra. Its roots are the values of `f` at every
/// tuple of conjugates, so it annihilates `f`.
fn charpoly_of(f: &FieldElem) -> Vec<BigRational> {
    let degs: Vec<u32> = f.gens.iter().map(|g| g.degree() as u32).collect();
    let n = degs.len();
    let dim: usize = degs.iter().map(|&d| d as usize).product();
    let index = |e: &[u32]| -> usize {
        let mut idx = 0usize;
        for i in 0..n {
            idx = idx * degs[i] as usize + e[i] as usize;
        }
        idx
    };
    let mut basis = Vec::with_capacity(dim);
    for mut k in 0..dim {
        let mut e = vec![0u32; n];
        for i in (0..n).rev() {
            e[i] = (k % degs[i] as usize) as u32;
            k /= degs[i] as usize;
        }
        basis.push(e);
    }
    let mut m = vec![vec![BigRational::zero(); dim]; dim];
    for (j, e) in basis.iter().enumerate() {
        let mono = MPoly::from_terms(n, [(e.clone(), BigRational::one())]);
        let prod = reduce(&f.gens, f.poly.mul(&mono));
        for (ee, c) in prod.terms() {
            m[index(ee)][j] = c.clone();
        }
    }
    charpoly(m)
}

/// Characteristic polynomial via Hessenberg reduction (constant term first).
pub(crate) fn charpoly(mut h: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h[i][m - 1].is_zero()) else { continue };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        for j in m + 1..n {
            if h[j][m - 1].is_zero() {
                continue;
            }
            let u = &h[j][m - 1] / &h[m][m - 1];
            for k in 0..n {
                let t = &u * &h[m][k];
                h[j][k] -= t;
            }
            for row in h.iter_mut() {
                let t = &u * &row[j];
                row[m] += t;
            }
        }
    }
    // p_m = (x - h_mm) p_{m-1} - sum_i t_i h_{m-i,m} p_{m-i-1}
    let mut p: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    for m in 1..=n {
        let prev = &p[m - 1];
        let mut next = vec![BigRational::zero(); m + 1];
        for (k, c) in prev.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &h[m - 1][m - 1];
        }
        let mut t = BigRational::one();
        for i in 1..m {
            t *= &h[m - i][m - i - 1];
            let coef = &t * &h[m - i - 1][m - 1];
            if coef.is_zero() {
                continue;
            }
            for (k, c) in p[m - i - 1].iter().enumerate() {
                next[k] -= &coef * c;
            }
        }
        p.push(next);
    }
    p.pop().unwrap()
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        if let (ExactScalar::Rat(a), ExactScalar::Rat(b)) = (self, o) {
            return ExactScalar::Rat(a + b);
        }
        let (g, a, b) = align(self, o);
        let s = a.add(&b);
        match s.as_constant() {
            Some(c) => ExactScalar::Rat(c),
            None => ExactScalar::Alg(Arc::new(FieldElem { gens: g, poly: s })),
        }
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        if let (ExactScalar::Rat(a), ExactScalar::Rat(b)) = (self, o) {
            return ExactScalar::Rat(a - b);
        }
        let (g, a, b) = align(self, o);
        let s = a.sub(&b);
        match s.as_constant() {
            Some(c) => ExactScalar::Rat(c),
            None => ExactScalar::Alg(Arc::new(FieldElem { gens: g, poly: s })),
        }
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        match (self, o) {
            (ExactScalar::Rat(a), ExactScalar::Rat(b)) => ExactScalar::Rat(a * b),
            (ExactScalar::Rat(a), ExactScalar::Alg(f)) | (ExactScalar::Alg(f), ExactScalar::Rat(a)) => {
                if a.is_zero() {
                    return ExactScalar::zero();
                }
                ExactScalar::Alg(Arc::new(FieldElem { gens: f.gens.clone(), poly: f.poly.scale(a) }))
            }
            _ => {
                let (g, a, b) = align(self, o);
                ExactScalar::from_parts(g, a.mul(&b))
            }
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match self {
            ExactScalar::Rat(r) => ExactScalar::Rat(-r),
            ExactScalar::Alg(f) => ExactScalar::Alg(Arc::new(FieldElem { gens: f.gens.clone(), poly: f.poly.neg() })),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl PartialEq for ExactScalar {
    fn eq(&self, o: &Self) -> bool {
        self.cmp_exact(o) == Ordering::Equal
    }
}
impl Eq for ExactScalar {}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ExactScalar {
    fn cmp(&self, o: &Self) -> Ordering {
        self.cmp_exact(o)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        ExactScalar::Rat(r)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

impl From<AlgebraicNumber> for ExactScalar {
    fn from(a: AlgebraicNumber) -> Self {
        ExactScalar::from_algebraic(a)
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rat(r) => write!(f, "{r}"),
            ExactScalar::Alg(fe) => {
                write!(f, "{} (~{:.12})", fe.poly, self.to_f64())?;
                for (i, g) in fe.gens.iter().enumerate() {
                    write!(f, "; x{i} = {g}")?;
                }
                Ok(())
            }
        }
    }
}
