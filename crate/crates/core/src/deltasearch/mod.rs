//! Exact minimum cylinder separation `Delta_n` under the strict distance, and
//! exact-overlap search, by branch-and-bound over pairs of words.
//!
//! Pairs `(a, b)` are explored position by position in the interleaved order
//! `(a_1, b_1), (a_2, b_2), ..`. A node stores the exact translation
//! difference of the two prefixes; its completions can move each coordinate
//! by at most the prefix ratios times the range of suffix translations, which
//! gives the lower bound used for pruning. Nodes at one depth with identical
//! exact state have identical completions, so only the one with the least
//! prefix is expanded.

mod brute;
mod search;

pub use brute::{delta_n_bruteforce, delta_n_bruteforce_with_cap, DEFAULT_ORACLE_CAP};
pub use search::{delta_n, delta_n_with, delta_profile, delta_profile_with, has_exact_overlap_upto, has_exact_overlap_upto_with};

use std::cmp::Ordering;

use crate::error::Result;
use crate::simcore::{compose_word, dist_strict, IFSInstance, StrictDistance, Word};

/// Default node budget of a single search.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum number of search nodes before giving up.
    pub budget: u64,
    /// Lower-bound pruning and state deduplication; turning this off leaves
    /// only the exact leaf comparisons.
    pub prune: bool,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: DEFAULT_BUDGET, prune: true, parallel: true }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: u64) -> Self {
        SearchConfig { budget, ..Self::default() }
    }
}

/// Two distinct words of equal length and the strict distance between their
/// compositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    pub a: Word,
    pub b: Word,
    pub level: usize,
    pub value: StrictDistance,
}

impl WitnessPair {
    /// Recomputes the distance from the words alone.
    pub fn recompute(&self, ifs: &IFSInstance) -> Result<StrictDistance> {
        Ok(dist_strict(&compose_word(ifs, &self.a)?, &compose_word(ifs, &self.b)?))
    }
}

#[derive(Clone, Debug)]
pub struct DeltaResult {
    pub level: usize,
    pub delta: StrictDistance,
    pub witness: Option<WitnessPair>,
    pub nodes_explored: u64,
    pub exact_confirmations: u64,
    /// False when the budget ran out; `delta` is then only an upper bound.
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct DeltaProfile {
    pub results: Vec<DeltaResult>,
    /// True when some level exhausted its budget; results stop there.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub enum OverlapOutcome {
    Found(WitnessPair),
    Absent,
    /// Budget ran out at `level`; levels below it are certified overlap-free.
    Indeterminate { level: usize },
}

impl OverlapOutcome {
    pub fn witness(&self) -> Option<&WitnessPair> {
        match self {
            OverlapOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
}

/// Interleaved lexicographic order on pairs of equal-length index words.
pub(crate) fn cmp_interleaved(a1: &[usize], b1: &[usize], a2: &[usize], b2: &[usize]) -> Ordering {
    for i in 0..a1.len().min(a2.len()) {
        match a1[i].cmp(&a2[i]).then(b1[i].cmp(&b2[i])) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a1.len().cmp(&a2.len())
}

#[cfg(test)]
mod tests;
