use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::serde_util::{rat_str, vec_rat_str};
use crate::exactnum::{parse_rat, MPoly};
use crate::families::parse_poly;

/// A sequence of positive exact bounds `omega_n`, `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OmegaSpec {
    /// `omega_n = values[n - 1]`.
    Table {
        #[serde(with = "vec_rat_str")]
        values: Vec<BigRational>,
    },
    /// `omega_n = c rho^(n^2)`.
    SuperExp {
        #[serde(with = "rat_str")]
        c: BigRational,
        #[serde(with = "rat_str")]
        rho: BigRational,
    },
    /// `omega_n = c rho^e(n)` for a polynomial exponent `e` in `n`.
    Custom {
        #[serde(with = "rat_str")]
        c: BigRational,
        #[serde(with = "rat_str")]
        rho: BigRational,
        exponent: String,
    },
}

impl OmegaSpec {
    /// `2^(-n^2)`.
    pub fn two_pow_neg_n_squared() -> Self {
        OmegaSpec::SuperExp { c: BigRational::one(), rho: BigRational::new(1.into(), 2.into()) }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |r: &BigRational| r.is_positive() && r <= &BigRational::one();
        match self {
            OmegaSpec::Table { values } => {
                if values.is_empty() || values.iter().any(|v| !v.is_positive()) {
                    return Err(Error::InvalidInput("omega table entries must be positive".into()));
                }
            }
            OmegaSpec::SuperExp { c, rho } => {
                if !c.is_positive() || !in_unit(rho) {
                    return Err(Error::InvalidInput("omega needs c > 0 and rho in (0, 1]".into()));
                }
            }
            OmegaSpec::Custom { c, rho, exponent } => {
                if !c.is_positive() || !in_unit(rho) {
                    return Err(Error::InvalidInput("omega needs c > 0 and rho in (0, 1]".into()));
                }
                self.exponent_poly(exponent)?;
            }
        }
        Ok(())
    }

    fn exponent_poly(&self, e: &str) -> Result<MPoly> {
        parse_poly(e, &["n".to_string()])
    }

    pub fn at(&self, n: usize) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::InvalidInput("omega is indexed from 1".into()));
        }
        match self {
            OmegaSpec::Table { values } => values
                .get(n - 1)
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("omega table has {} entries, level {n} needed", values.len()))),
            OmegaSpec::SuperExp { c, rho } => Ok(c * num_traits::pow(rho.clone(), n * n)),
            OmegaSpec::Custom { c, rho, exponent } => {
                let e = self.exponent_poly(exponent)?.eval_rat(&[BigRational::from_integer(n.into())]);
                if !e.is_integer() || e.is_negative() {
                    return Err(Error::InvalidInput(format!("exponent {exponent} at n = {n} is not a natural number")));
                }
                let k = e.to_integer().to_usize().ok_or_else(|| Error::ResourceLimit("omega exponent too large".into()))?;
                Ok(c * num_traits::pow(rho.clone(), k))
            }
        }
    }

    /// `min { omega_n : lo <= n <= hi }`.
    pub fn min_over(&self, lo: usize, hi: usize) -> Result<BigRational> {
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty level range [{lo}, {hi}]")));
        }
        if let OmegaSpec::SuperExp { .. } = self {
            // non-increasing in n
            return self.at(hi);
        }
        let mut best = self.at(lo)?;
        for n in lo + 1..=hi {
            let w = self.at(n)?;
            if w < best {
                best = w;
            }
        }
        Ok(best)
    }

    /// Parses `1/2,1/4,1/16`, `2^-n^2`, or `c*r^(e)` with a polynomial `e` in `n`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognised omega `{s}`"));
        if s.contains(',') || (!s.contains('n') && !s.contains('^')) {
            let values = s.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?;
            let o = OmegaSpec::Table { values };
            o.validate()?;
            return Ok(o);
        }
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        // b^-e  means (1/b)^e
        let (c, rest) = match compact.split_once('*') {
            Some((c, r)) => (parse_rat(c)?, r.to_string()),
            None => (BigRational::one(), compact.clone()),
        };
        let (base, exp) = rest.split_once('^').ok_or_else(bad)?;
        let mut rho = parse_rat(base.trim_start_matches('(').trim_end_matches(')'))?;
        let mut exp = exp.trim_start_matches('(').trim_end_matches(')').to_string();
        if let Some(e) = exp.strip_prefix('-') {
            if rho.is_zero() {
                return Err(bad());
            }
            rho = rho.recip();
            exp = e.trim_start_matches('(').trim_end_matches(')').to_string();
        }
        let o = if exp == "n^2" || exp == "n*n" {
            OmegaSpec::SuperExp { c, rho }
        } else {
            OmegaSpec::Custom { c, rho, exponent: exp }
        };
        o.validate()?;
        Ok(o)
    }
}
