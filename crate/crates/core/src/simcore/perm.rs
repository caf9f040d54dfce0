use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;

/// Orthogonal matrix with one `±1` per row and column: `(Ox)_i = s_i x_{p_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if perm.len() != signs.len() {
            return Err(Error::DimensionMismatch(perm.len(), signs.len()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of 0..{}", perm.len())));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("signs must be +1 or -1".into()));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(d: usize) -> Self {
        SignedPermutation { perm: (0..d).collect(), signs: vec![1; d] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    /// Matrix product `self * o`.
    pub fn compose(&self, o: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.dim(), o.dim());
        let perm = self.perm.iter().map(|&p| o.perm[p]).collect();
        let signs = self.perm.iter().zip(&self.signs).map(|(&p, &s)| s * o.signs[p]).collect();
        SignedPermutation { perm, signs }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let d = self.dim();
        let mut perm = vec![0; d];
        let mut signs = vec![1; d];
        for i in 0..d {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPermutation { perm, signs }
    }

    pub fn apply(&self, x: &[ExactScalar]) -> Vec<ExactScalar> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| if s > 0 { x[p].clone() } else { -&x[p] })
            .collect()
    }

    pub fn to_matrix(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        let mut m = vec![vec![0i64; d]; d];
        for i in 0..d {
            m[i][self.perm[i]] = self.signs[i] as i64;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let d = a.len();
        (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    }

    fn arb_perm(d: usize) -> impl Strategy<Value = SignedPermutation> {
        (Just((0..d).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(prop::bool::ANY, d))
            .prop_map(|(p, s)| SignedPermutation::new(p, s.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap())
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(SignedPermutation::new(vec![0, 0], vec![1, 1]).is_err());
        assert!(SignedPermutation::new(vec![0, 1], vec![1, 2]).is_err());
    }

    proptest! {
        #[test]
        fn compose_matches_matrix_product(a in arb_perm(4), b in arb_perm(4)) {
            prop_assert_eq!(a.compose(&b).to_matrix(), mat_mul(&a.to_matrix(), &b.to_matrix()));
        }

        #[test]
        fn inverse_is_inverse(a in arb_perm(5)) {
            prop_assert!(a.compose(&a.inverse()).is_identity());
            prop_assert!(a.inverse().compose(&a).is_identity());
        }
    }
}
