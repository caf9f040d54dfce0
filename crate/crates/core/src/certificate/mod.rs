//! Serialized form of a finite-stage construction: the family, the bound
//! sequence, the stage points with their witnesses and radii, and the
//! claimed guarantees.

mod omega;

pub use omega::OmegaSpec;

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::serde_util::opt_rat_str;
use crate::families::{FamilySpec, ParamPoint};
use crate::simcore::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordPair {
    pub a: Word,
    pub b: Word,
}

/// Stage `k`; stage 0 holds the seeds and has no joint radius, the last
/// stage has no `U`/`V` radii.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub k: usize,
    pub u: ParamPoint,
    pub v: ParamPoint,
    pub n: usize,
    pub m: usize,
    pub witness_u: WordPair,
    pub witness_v: WordPair,
    /// Radius of the closed joint ball around `(u, v)`.
    #[serde(with = "opt_rat_str")]
    pub delta: Option<BigRational>,
    /// Radius of the open ball around `u` used for the next stage.
    #[serde(with = "opt_rat_str")]
    pub eps: Option<BigRational>,
    #[serde(with = "opt_rat_str")]
    pub eps_prime: Option<BigRational>,
}

impl Stage {
    pub fn level(&self) -> usize {
        self.n.max(self.m)
    }

    pub fn joint(&self) -> ParamPoint {
        ParamPoint::join(&self.u, &self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guarantees {
    /// `Delta_n <= omega_n` at the final point for `n` in this closed range.
    pub delta_range: [usize; 2],
    /// No exact overlap at the final point up to this level.
    pub no_overlap_upto: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub family: FamilySpec,
    pub omega: OmegaSpec,
    pub stages: Vec<Stage>,
    pub guarantees: Guarantees,
}

fn json_err(e: serde_json::Error) -> Error {
    match e.classify() {
        serde_json::error::Category::Data => Error::Schema(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

impl Certificate {
    /// Number of stages after the seeds.
    pub fn stage_count(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }

    pub fn last(&self) -> Option<&Stage> {
        self.stages.last()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(json_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
