//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::{FInterval, RatInterval};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn take_terms(self) -> BTreeMap<Vec<u32>, BigRational> {
        self.terms
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.nvars, BigRational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Re-indexes variables: variable `i` becomes `map[i]` in a ring of `nvars` variables.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] += x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Coefficients of a polynomial in a single variable, constant first.
    pub fn univariate_coeffs(&self) -> Vec<BigRational> {
        assert!(self.nvars <= 1);
        let d = self.total_degree() as usize;
        let mut v = vec![BigRational::zero(); d + 1];
        for (e, c) in &self.terms {
            let k = e.first().copied().unwrap_or(0) as usize;
            v[k] = c.clone();
        }
        v
    }

    pub fn eval_rat(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_interval(&self, x: &[RatInterval]) -> RatInterval {
        let mut cache: Vec<Vec<RatInterval>> = x.iter().map(|xi| vec![RatInterval::point(BigRational::one()), xi.clone()]).collect();
        let mut acc = RatInterval::point(BigRational::zero());
        for (e, c) in &self.terms {
            let mut t = RatInterval::point(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while cache[i].len() <= k {
                    let next = if x[i].contains_zero() && cache[i].len() % 2 == 0 {
                        x[i].pow(cache[i].len() as u32)
                    } else {
                        let last = cache[i].last().unwrap().clone();
                        &last * &x[i]
                    };
                    cache[i].push(next);
                }
                t = &t * &cache[i][k];
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_f(&self, x: &[FInterval]) -> FInterval {
        let mut acc = FInterval::point(0.0);
        for (e, c) in &self.terms {
            let mut t = RatInterval::point(c.clone()).to_f64();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * x[i];
                }
            }
            acc = acc + t;
        }
        acc
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn ring_ops() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = x.add(&y).pow(2);
        let q = x.pow(2).add(&x.mul(&y).scale(&int(2))).add(&y.pow(2));
        assert_eq!(p, q);
        assert_eq!(p.sub(&q), MPoly::zero(2));
        assert_eq!(p.eval_rat(&[rat(1, 2), rat(1, 3)]), rat(25, 36));
    }

    #[test]
    fn interval_eval_encloses() {
        let x = MPoly::var(1, 0);
        let p = x.pow(2).sub(&MPoly::constant(1, int(2)));
        let r = p.eval_interval(&[RatInterval::new(int(-1), int(2))]);
        assert!(r.lo <= int(-2) && r.hi >= int(2));
        assert_eq!(r.lo, int(-2));
    }
}
