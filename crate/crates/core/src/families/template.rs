use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, MPoly};
use crate::simcore::{IFSInstance, SignedPermutation, SimilarityMap};

/// One map `x -> ratio(p) x + t(p)` with polynomial dependence on the
/// parameter vector `p`. Orthogonal parts are the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapTemplate {
    pub label: String,
    pub ratio: MPoly,
    pub t: Vec<MPoly>,
}

/// A parameterised IFS: maps whose ratios and translations are polynomials
/// in `nvars` parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub nvars: usize,
    pub dim: usize,
    pub maps: Vec<MapTemplate>,
}

/// Ratio products and translation difference of a word pair, as polynomials.
#[derive(Clone, Debug)]
pub struct SymbolicPair {
    pub ratio_a: MPoly,
    pub ratio_b: MPoly,
    pub diff: Vec<MPoly>,
}

impl SymbolicPair {
    pub fn same_ratio(&self) -> bool {
        self.ratio_a == self.ratio_b
    }

    /// True when every coordinate of the difference has degree at most one.
    pub fn is_affine(&self) -> bool {
        self.diff.iter().all(|f| f.total_degree() <= 1)
    }
}

impl Template {
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.maps.iter().position(|m| m.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn instantiate(&self, params: &[ExactScalar]) -> Result<IFSInstance> {
        if params.len() != self.nvars {
            return Err(Error::DimensionMismatch(self.nvars, params.len()));
        }
        let maps = self
            .maps
            .iter()
            .map(|m| {
                let r = ExactScalar::eval_mpoly(&m.ratio, params);
                let t = m.t.iter().map(|f| ExactScalar::eval_mpoly(f, params)).collect();
                Ok((m.label.clone(), SimilarityMap::new(r, SignedPermutation::identity(self.dim), t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        IFSInstance::new(self.dim, maps)
    }

    /// Ratio and translation of a composed word, as polynomials.
    pub fn compose_word(&self, w: &[String]) -> Result<(MPoly, Vec<MPoly>)> {
        let mut ratio = MPoly::constant(self.nvars, BigRational::from_integer(1.into()));
        let mut t = vec![MPoly::zero(self.nvars); self.dim];
        for l in w {
            let m = &self.maps[self.index_of(l)?];
            for (tj, mj) in t.iter_mut().zip(&m.t) {
                *tj = tj.add(&ratio.mul(mj));
            }
            ratio = ratio.mul(&m.ratio);
        }
        Ok((ratio, t))
    }

    pub fn pair(&self, a: &[String], b: &[String]) -> Result<SymbolicPair> {
        let (ra, ta) = self.compose_word(a)?;
        let (rb, tb) = self.compose_word(b)?;
        let diff = ta.iter().zip(&tb).map(|(x, y)| x.sub(y)).collect();
        Ok(SymbolicPair { ratio_a: ra, ratio_b: rb, diff })
    }
}
