//! Parameterised families of self-similar systems: two one-parameter-block
//! systems `Phi_u`, `Phi_v` and their joint system `Phi_(u,v)`.
//!
//! `H1(n)`, `H2(n)`, `H3(n)` are the parameters whose `U`, `V` or joint
//! system has an exact overlap at some level at most `n`.

pub mod balls;
mod example1;
mod example2;
mod template;
mod user;

pub use example1::Lambda;
pub use template::{MapTemplate, SymbolicPair, Template};
pub use user::{parse_poly, UserFamily, UserMap};

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::deltasearch::{has_exact_overlap_upto_with, OverlapOutcome, SearchConfig, WitnessPair};
use crate::error::{Error, Result};
use crate::exactnum::serde_util::rat_str;
use crate::exactnum::{ExactScalar, RatInterval};
use crate::simcore::{IFSInstance, StrictDistance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeChoice {
    /// Union of the `U` and `V` digit sets.
    #[default]
    Union,
    /// Every formal sum of `1`, `u_j`, `v_j` per coordinate.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    U,
    V,
    Joint,
}

fn one_dim() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    /// Maps `lambda (x + a)`, digits `a` in `{0, 1, u, 1+u}^d` and likewise for `v`.
    Example1 {
        #[serde(with = "rat_str")]
        lambda: BigRational,
        #[serde(default = "one_dim")]
        dim: usize,
        #[serde(default)]
        merge: MergeChoice,
    },
    /// Maps `u (x + 1)`, `u (x + 2)` with `u` in `(1/2, 1)`.
    Example2,
    User(UserFamily),
}

/// Parameters of one side, or `u` followed by `v` for the joint system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamPoint(pub Vec<ExactScalar>);

impl ParamPoint {
    pub fn join(u: &ParamPoint, v: &ParamPoint) -> ParamPoint {
        ParamPoint(u.0.iter().chain(&v.0).cloned().collect())
    }
}

#[derive(Clone, Debug)]
pub struct OverlapLevel {
    pub level: usize,
    pub witness: WitnessPair,
    /// Levels below `level` are certified overlap-free.
    pub starred: bool,
}

#[derive(Clone, Debug)]
pub struct LevelConfig {
    /// Example-1 levels up to this bound are also found by search and
    /// compared with the closed form.
    pub search_cap: usize,
    pub search: SearchConfig,
}

impl Default for LevelConfig {
    fn default() -> Self {
        LevelConfig { search_cap: 6, search: SearchConfig::default() }
    }
}

impl FamilySpec {
    pub fn example1(lambda: BigRational, dim: usize) -> Self {
        FamilySpec::Example1 { lambda, dim, merge: MergeChoice::Union }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::Example1 { lambda, dim, .. } => {
                Lambda::new(lambda)?;
                if *dim == 0 {
                    return Err(Error::InvalidInput("dimension must be positive".into()));
                }
                Ok(())
            }
            FamilySpec::Example2 => Ok(()),
            FamilySpec::User(u) => {
                for s in [Side::U, Side::V, Side::Joint] {
                    u.template(s)?;
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FamilySpec::Example1 { lambda, dim, .. } => format!("example1(lambda={lambda}, d={dim})"),
            FamilySpec::Example2 => "example2".into(),
            FamilySpec::User(_) => "user".into(),
        }
    }

    /// Number of parameters on a side.
    pub fn params(&self, side: Side) -> usize {
        let (k1, k2) = match self {
            FamilySpec::Example1 { dim, .. } => (*dim, *dim),
            FamilySpec::Example2 => (1, 1),
            FamilySpec::User(u) => (u.u_params.len(), u.v_params.len()),
        };
        match side {
            Side::U => k1,
            Side::V => k2,
            Side::Joint => k1 + k2,
        }
    }

    pub fn template(&self, side: Side) -> Result<Template> {
        match self {
            FamilySpec::Example1 { lambda, dim, merge } => {
                Lambda::new(lambda)?;
                Ok(example1::template(lambda, *dim, side, *merge))
            }
            FamilySpec::Example2 => Ok(example2::template(side)),
            FamilySpec::User(u) => u.template(side),
        }
    }

    fn split<'a>(&self, side: Side, point: &'a [ExactScalar]) -> Result<Vec<(Side, &'a [ExactScalar])>> {
        if point.len() != self.params(side) {
            return Err(Error::DimensionMismatch(self.params(side), point.len()));
        }
        Ok(match side {
            Side::Joint => {
                let k = self.params(Side::U);
                vec![(Side::U, &point[..k]), (Side::V, &point[k..])]
            }
            s => vec![(s, point)],
        })
    }

    /// Distance from the point to the boundary of the parameter domain, if
    /// the family has one.
    pub fn domain_margin(&self, side: Side, point: &[ExactScalar]) -> Result<Option<ExactScalar>> {
        let mut out: Option<ExactScalar> = None;
        for (_, p) in self.split(side, point)? {
            let m = match self {
                FamilySpec::Example1 { .. } => example1::domain_margin(p)?,
                FamilySpec::Example2 => example2::domain_margin(p)?,
                FamilySpec::User(_) => return Ok(None),
            };
            out = Some(match out {
                None => m,
                Some(o) => o.min_exact(m),
            });
        }
        Ok(out)
    }

    pub fn check_domain(&self, side: Side, point: &[ExactScalar]) -> Result<()> {
        self.domain_margin(side, point).map(|_| ())
    }

    pub fn instantiate(&self, side: Side, point: &[ExactScalar]) -> Result<IFSInstance> {
        self.check_domain(side, point)?;
        self.template(side)?.instantiate(point)
    }

    /// Least level `<= n_max` with an exact overlap, or `None` when there is
    /// none up to `n_max`.
    pub fn h_level(&self, side: Side, point: &[ExactScalar], n_max: usize, cfg: &LevelConfig) -> Result<Option<OverlapLevel>> {
        let ifs = self.instantiate(side, point)?;
        let closed = match (self, side) {
            (FamilySpec::Example1 { lambda, .. }, Side::U | Side::V) => {
                Some(example1::point_level(&Lambda::new(lambda)?, side, point, n_max)?)
            }
            _ => None,
        };
        let searched = match &closed {
            Some(_) if n_max > cfg.search_cap => None,
            _ => Some(search_level(&ifs, n_max, &cfg.search)?),
        };
        match (closed, searched) {
            (Some(c), Some(s)) => {
                let cl = c.as_ref().map(|p| p.level);
                let sl = s.as_ref().map(|w| w.level);
                assert_eq!(cl, sl, "closed-form level disagrees with search at {point:?}");
                Ok(s)
            }
            (_, Some(s)) => Ok(s),
            (Some(c), None) => match c {
                None => Ok(None),
                Some(p) => {
                    let witness = WitnessPair { a: p.a, b: p.b, level: p.level, value: StrictDistance::Finite(ExactScalar::zero()) };
                    if !witness.recompute(&ifs)?.is_zero() {
                        return Err(Error::InvalidInput("closed-form witness does not overlap".into()));
                    }
                    Ok(Some(OverlapLevel { level: p.level, witness, starred: true }))
                }
            },
            (None, None) => unreachable!(),
        }
    }

    /// Coordinate values of level at most `n` inside the open window.
    pub fn enumerate_h1(&self, n: usize, window: &RatInterval) -> Result<Vec<ExactScalar>> {
        match self {
            FamilySpec::Example1 { lambda, .. } => {
                Ok(example1::enumerate(&Lambda::new(lambda)?, n, window)?.into_iter().map(ExactScalar::from).collect())
            }
            FamilySpec::Example2 => example2::enumerate(n, window),
            FamilySpec::User(_) => Err(Error::Unsupported("enumeration for user-defined families".into())),
        }
    }

    /// A point within `eps` of `u` whose `U` system has no overlap up to
    /// level `l` but has one at a finite level.
    pub fn perturb_primary(&self, u: &[ExactScalar], l: usize, eps: &BigRational, n_cap: usize, cfg: &LevelConfig) -> Result<ParamPoint> {
        self.check_domain(Side::U, u)?;
        match self {
            FamilySpec::Example1 { lambda, .. } => {
                let lam = Lambda::new(lambda)?;
                let pt = example1::rationals(u)?;
                let mut dens = Vec::new();
                for (j, x) in pt.iter().enumerate() {
                    if let Some((_, m2)) = lam.represent(x, l)? {
                        dens.push((j, m2));
                    }
                }
                let moved: Vec<usize> = dens.iter().map(|d| d.0).collect();
                let out = example1::shift_search(&lam, &pt, &dens, l, eps, n_cap, |c| {
                    for &j in &moved {
                        if lam.level(&c[j], l)?.is_some() {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })?;
                Ok(ParamPoint(out.into_iter().map(ExactScalar::from).collect()))
            }
            FamilySpec::Example2 => {
                let w = self.h_level(Side::U, u, l, cfg)?.ok_or_else(|| Error::InvalidInput("point has no overlap up to the level".into()))?;
                let kappa = example2::witness_poly(&w.witness.a, &w.witness.b)?;
                let x = example2::perturb(&kappa, &u[0], eps, l + 1, n_cap, |x| example2::avoids_small_polys(&example2::algebraic(x), l))?;
                Ok(ParamPoint(vec![x]))
            }
            FamilySpec::User(_) => Err(Error::Unsupported("perturbation for user-defined families".into())),
        }
    }

    /// A point within `eps` of `v` such that `(u1, v1)` has no joint overlap
    /// up to level `l`, while `v1` has a `V` overlap at a finite level.
    pub fn perturb_secondary(
        &self,
        u1: &[ExactScalar],
        v: &[ExactScalar],
        l: usize,
        eps: &BigRational,
        n_cap: usize,
        cfg: &LevelConfig,
    ) -> Result<ParamPoint> {
        self.check_domain(Side::U, u1)?;
        self.check_domain(Side::V, v)?;
        let joint_free = |v1: &[ExactScalar]| -> Result<bool> {
            let p = ParamPoint::join(&ParamPoint(u1.to_vec()), &ParamPoint(v1.to_vec()));
            let ifs = self.instantiate(Side::Joint, &p.0)?;
            match has_exact_overlap_upto_with(&ifs, l, &cfg.search)? {
                OverlapOutcome::Absent => Ok(true),
                OverlapOutcome::Found(_) => Ok(false),
                OverlapOutcome::Indeterminate { .. } => Err(Error::BudgetExceeded { budget: cfg.search.budget }),
            }
        };
        match self {
            FamilySpec::Example1 { lambda, .. } => {
                let lam = Lambda::new(lambda)?;
                let pv = example1::rationals(v)?;
                let pu = example1::rationals(u1)?;
                let mut dens = Vec::new();
                for (j, x) in pv.iter().enumerate() {
                    if let Some((_, m2)) = lam.represent(x, l)? {
                        dens.push((j, m2));
                    } else if pv.len() > 1 {
                        if let Some(g) = example1::joint_representation(&lam, &pu[j], x, l)? {
                            dens.push((j, g));
                        }
                    }
                }
                let moved: Vec<usize> = dens.iter().map(|d| d.0).collect();
                let out = example1::shift_search(&lam, &pv, &dens, l, eps, n_cap, |c| {
                    for &j in &moved {
                        if lam.level(&c[j], l)?.is_some() {
                            return Ok(false);
                        }
                    }
                    let c: Vec<ExactScalar> = c.iter().cloned().map(ExactScalar::from).collect();
                    joint_free(&c)
                })?;
                Ok(ParamPoint(out.into_iter().map(ExactScalar::from).collect()))
            }
            FamilySpec::Example2 => {
                let w = self.h_level(Side::V, v, l, cfg)?.ok_or_else(|| Error::InvalidInput("point has no overlap up to the level".into()))?;
                let kappa = example2::witness_poly(&w.witness.a, &w.witness.b)?;
                let x = example2::perturb(&kappa, &v[0], eps, l + 1, n_cap, |x| joint_free(std::slice::from_ref(x)))?;
                Ok(ParamPoint(vec![x]))
            }
            FamilySpec::User(_) => Err(Error::Unsupported("perturbation for user-defined families".into())),
        }
    }

    /// Symbolic difference of a witness pair on one side.
    pub fn witness_pair(&self, side: Side, a: &[String], b: &[String]) -> Result<SymbolicPair> {
        self.template(side)?.pair(a, b)
    }

    /// Radius certified for a witness: see [`balls::canonical_epsilon`].
    pub fn epsilon_radius(
        &self,
        side: Side,
        center: &[ExactScalar],
        pair: &SymbolicPair,
        bound: &BigRational,
        outer: Option<&BigRational>,
    ) -> Result<BigRational> {
        let margin = match self.domain_margin(side, center)? {
            Some(m) => balls::rational_below(&m)?,
            None => outer.cloned().unwrap_or_else(BigRational::one) * BigRational::from_integer(2.into()),
        };
        balls::canonical_epsilon(pair, center, bound, outer, &margin)
    }
}

fn search_level(ifs: &IFSInstance, n_max: usize, cfg: &SearchConfig) -> Result<Option<OverlapLevel>> {
    match has_exact_overlap_upto_with(ifs, n_max, cfg)? {
        OverlapOutcome::Found(w) => Ok(Some(OverlapLevel { level: w.level, witness: w, starred: true })),
        OverlapOutcome::Absent => Ok(None),
        OverlapOutcome::Indeterminate { .. } => Err(Error::BudgetExceeded { budget: cfg.budget }),
    }
}

#[cfg(test)]
mod tests;
