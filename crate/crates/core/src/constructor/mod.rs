//! Stage-by-stage construction of nested parameter balls.
//!
//! From stage `k` with points `u_k in H1*(n_k)`, `v_k in H2*(m_k)` and
//! `L_k = max(n_k, m_k)`:
//! 1. `eps_k` keeps the `u_k` witness within `min omega` over `[n_k, L_k]`
//!    on `B(u_k, eps_k)`;
//! 2. `u_(k+1)` in that ball has least overlap level `n_(k+1) > L_k`;
//! 3. `eps'_k` keeps the `v_k` witness within `min omega` over
//!    `[m_k, n_(k+1)]` on `B(v_k, eps'_k)`;
//! 4. `v_(k+1)` in that ball has least level `m_(k+1) > L_k` and the joint
//!    system at `(u_(k+1), v_(k+1))` has no overlap up to `L_k`;
//! 5. `delta_(k+1)` gives a closed joint ball inside both open balls on
//!    which no joint overlap up to `L_k` occurs.
//!
//! Radii after the first stage are also capped by half the previous joint
//! radius, so every ball sits in the one before.

use num_rational::BigRational;
use num_traits::Signed;

use crate::certificate::{Certificate, Guarantees, OmegaSpec, Stage, WordPair};
use crate::deltasearch::WitnessPair;
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, RatInterval};
use crate::families::balls::{canonical_delta, container_gap, rational_below};
use crate::families::{FamilySpec, LevelConfig, OverlapLevel, ParamPoint, Side};

#[derive(Clone, Debug)]
pub struct ConstructorConfig {
    /// Largest overlap level a stage point may have.
    pub level_cap: usize,
    pub levels: LevelConfig,
    /// Node budget of one exclusion-ball certification.
    pub exclusion_budget: u64,
}

impl Default for ConstructorConfig {
    fn default() -> Self {
        ConstructorConfig { level_cap: 1 << 17, levels: LevelConfig::default(), exclusion_budget: 50_000_000 }
    }
}

fn words(w: &WitnessPair) -> WordPair {
    WordPair { a: w.a.clone(), b: w.b.clone() }
}

/// Radius of a ball around `p` on which the witness stays within `bound`.
pub fn epsilon_radius(
    family: &FamilySpec,
    side: Side,
    p: &ParamPoint,
    witness: &WordPair,
    bound: &BigRational,
    outer: Option<&BigRational>,
) -> Result<BigRational> {
    if !bound.is_positive() {
        return Err(Error::InvalidInput("bound must be positive".into()));
    }
    let pair = family.witness_pair(side, &witness.a, &witness.b)?;
    family.epsilon_radius(side, &p.0, &pair, bound, outer)
}

/// Radius of a closed ball around the joint point that avoids `H3(l)` and
/// lies inside the open balls `B(c_u, r_u) x B(c_v, r_v)`.
pub fn exclusion_radius(
    family: &FamilySpec,
    point: &ParamPoint,
    l: usize,
    container: [(&ParamPoint, &BigRational); 2],
    budget: u64,
) -> Result<BigRational> {
    if container.iter().any(|(_, r)| !r.is_positive()) {
        return Err(Error::InvalidInput("container has a non-positive radius".into()));
    }
    let balls: Vec<(&[ExactScalar], &BigRational)> = container.iter().map(|(c, r)| (c.0.as_slice(), *r)).collect();
    let gap = container_gap(&point.0, &balls)?;
    let start = rational_below(&(&gap * &ExactScalar::from(BigRational::new(1.into(), 2.into()))))?;
    canonical_delta(&family.template(Side::Joint)?, &point.0, &start, l, budget)
}

fn least_level(family: &FamilySpec, side: Side, p: &ParamPoint, cap: usize, cfg: &LevelConfig) -> Result<OverlapLevel> {
    family
        .h_level(side, &p.0, cap, cfg)?
        .ok_or_else(|| Error::ResourceLimit(format!("no overlap found up to the level cap {cap}")))
}

/// Stage 0 from seeds, with their least overlap levels and witnesses.
pub fn seed_stage(family: &FamilySpec, u0: &ParamPoint, v0: &ParamPoint, cfg: &ConstructorConfig) -> Result<Stage> {
    family.validate()?;
    let lu = least_level(family, Side::U, u0, cfg.level_cap, &cfg.levels)?;
    let lv = least_level(family, Side::V, v0, cfg.level_cap, &cfg.levels)?;
    for (side, p, l) in [(Side::U, u0, &lu), (Side::V, v0, &lv)] {
        if !l.witness.recompute(&family.instantiate(side, &p.0)?)?.is_zero() {
            return Err(Error::InvalidInput("seed witness does not overlap".into()));
        }
    }
    Ok(Stage {
        k: 0,
        u: u0.clone(),
        v: v0.clone(),
        n: lu.level,
        m: lv.level,
        witness_u: words(&lu.witness),
        witness_v: words(&lv.witness),
        delta: None,
        eps: None,
        eps_prime: None,
    })
}

/// Fills the radii of `cur` and returns the next stage.
pub fn inductive_step(family: &FamilySpec, omega: &OmegaSpec, cur: &mut Stage, cfg: &ConstructorConfig) -> Result<Stage> {
    let l = cur.level();
    let outer = cur.delta.clone();

    let eps = epsilon_radius(family, Side::U, &cur.u, &cur.witness_u, &omega.min_over(cur.n, l)?, outer.as_ref())?;
    let u1 = family.perturb_primary(&cur.u.0, l, &eps, cfg.level_cap, &cfg.levels)?;
    let lu = least_level(family, Side::U, &u1, cfg.level_cap, &cfg.levels)?;
    if lu.level <= l {
        return Err(Error::InvalidInput(format!("perturbed point has level {} <= {l}", lu.level)));
    }

    let eps_prime = epsilon_radius(family, Side::V, &cur.v, &cur.witness_v, &omega.min_over(cur.m, lu.level)?, outer.as_ref())?;
    let v1 = family.perturb_secondary(&u1.0, &cur.v.0, l, &eps_prime, cfg.level_cap, &cfg.levels)?;
    let lv = least_level(family, Side::V, &v1, cfg.level_cap, &cfg.levels)?;
    if lv.level <= l {
        return Err(Error::InvalidInput(format!("perturbed point has level {} <= {l}", lv.level)));
    }

    let joint = ParamPoint::join(&u1, &v1);
    let delta = exclusion_radius(family, &joint, l, [(&cur.u, &eps), (&cur.v, &eps_prime)], cfg.exclusion_budget)?;
    cur.eps = Some(eps);
    cur.eps_prime = Some(eps_prime);
    Ok(Stage {
        k: cur.k + 1,
        u: u1,
        v: v1,
        n: lu.level,
        m: lv.level,
        witness_u: words(&lu.witness),
        witness_v: words(&lv.witness),
        delta: Some(delta),
        eps: None,
        eps_prime: None,
    })
}

/// Seeds with their radii, and stage 1.
pub fn base_case(
    family: &FamilySpec,
    omega: &OmegaSpec,
    u0: &ParamPoint,
    v0: &ParamPoint,
    cfg: &ConstructorConfig,
) -> Result<(Stage, Stage)> {
    omega.validate()?;
    let mut s0 = seed_stage(family, u0, v0, cfg)?;
    omega.at(s0.level())?;
    let s1 = inductive_step(family, omega, &mut s0, cfg)?;
    Ok((s0, s1))
}

/// Least-level members of the level sets in a canonical window: `(0, 1)`
/// for the first example, `(1/2, 1)` for the second.
pub fn default_seeds(family: &FamilySpec) -> Result<(ParamPoint, ParamPoint)> {
    let one = BigRational::from_integer(1.into());
    let window = match family {
        FamilySpec::Example2 => RatInterval::new(BigRational::new(1.into(), 2.into()), one),
        FamilySpec::Example1 { .. } => RatInterval::new(BigRational::from_integer(0.into()), one),
        FamilySpec::User(_) => return Err(Error::Unsupported("default seeds for user-defined families".into())),
    };
    for n in 1..=12 {
        if let Some(x) = family.enumerate_h1(n, &window)?.into_iter().next() {
            let p = ParamPoint(vec![x; family.params(Side::U)]);
            return Ok((p.clone(), p));
        }
    }
    Err(Error::ResourceLimit("no seed of level at most 12".into()))
}

/// Outcome of a run that may stop early: the certificate for the stages
/// completed so far and the error that stopped the next one.
#[derive(Debug)]
pub struct PartialRun {
    pub certificate: Option<Certificate>,
    pub error: Option<Error>,
}

fn certificate(family: &FamilySpec, omega: &OmegaSpec, mut stages: Vec<Stage>) -> Certificate {
    let k = stages.len() - 1;
    // the last stage has no successor, so no inclusion radii
    stages[k].eps = None;
    stages[k].eps_prime = None;
    let guarantees = Guarantees { delta_range: [stages[0].n, stages[k].n], no_overlap_upto: stages[k - 1].level() };
    Certificate { family: family.clone(), omega: omega.clone(), stages, guarantees }
}

/// Runs up to `k` stages, keeping whatever was completed when a stage fails.
pub fn run_partial(
    family: &FamilySpec,
    omega: &OmegaSpec,
    seeds: Option<(ParamPoint, ParamPoint)>,
    k: usize,
    cfg: &ConstructorConfig,
) -> PartialRun {
    let fail = |e| PartialRun { certificate: None, error: Some(e) };
    if k == 0 {
        return fail(Error::InvalidInput("at least one stage is required".into()));
    }
    let (u0, v0) = match seeds.map_or_else(|| default_seeds(family), Ok) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let mut stages = match base_case(family, omega, &u0, &v0, cfg) {
        Ok((s0, s1)) => vec![s0, s1],
        Err(e) => return fail(e),
    };
    let mut error = None;
    while stages.len() <= k {
        let mut cur = stages.last().unwrap().clone();
        match inductive_step(family, omega, &mut cur, cfg) {
            Ok(next) => {
                *stages.last_mut().unwrap() = cur;
                stages.push(next);
            }
            Err(e) => {
                error = Some(e);
                break;
            }
        }
    }
    PartialRun { certificate: Some(certificate(family, omega, stages)), error }
}

/// Runs `k` stages and records the guarantees of the last one.
pub fn run(
    family: &FamilySpec,
    omega: &OmegaSpec,
    seeds: Option<(ParamPoint, ParamPoint)>,
    k: usize,
    cfg: &ConstructorConfig,
) -> Result<Certificate> {
    let r = run_partial(family, omega, seeds, k, cfg);
    match r.error {
        Some(e) => Err(e),
        None => Ok(r.certificate.expect("a run without error has a certificate")),
    }
}

#[cfg(test)]
mod tests;
