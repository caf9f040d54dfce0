//! Independent re-verification of a certificate from its serialized data.
//!
//! Everything is recomputed from the family description, the bound sequence
//! and the recorded points, words and radii; nothing produced during
//! construction is trusted.

use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::certificate::{Certificate, Stage};
use crate::deltasearch::{delta_n_with, has_exact_overlap_upto_with, OverlapOutcome, SearchConfig, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::families::balls::{canonical_delta, certify_inclusion, container_gap, rational_below};
use crate::families::{FamilySpec, LevelConfig, ParamPoint, Side};
use crate::simcore::{compose_word, dist_strict, IFSInstance, StrictDistance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
    /// Not run because an earlier check failed.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
            Status::Skipped => "skipped",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub overall: Status,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    /// 0 pass, 1 fail, 2 indeterminate.
    pub fn exit_code(&self) -> i32 {
        match self.overall {
            Status::Pass => 0,
            Status::Indeterminate => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<14} {:<13} {}", c.name, c.status, c.detail)?;
        }
        write!(f, "overall: {}", self.overall)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub search: SearchConfig,
    /// Budget of each exclusion-ball certification.
    pub exclusion_budget: u64,
    /// Levels up to which `Delta_n` is also recomputed in full.
    pub full_delta_upto: usize,
    pub levels: LevelConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            search: SearchConfig::default(),
            exclusion_budget: 50_000_000,
            full_delta_upto: 4,
            levels: LevelConfig::default(),
        }
    }
}

impl VerifyConfig {
    pub fn with_budget(budget: u64) -> Self {
        let mut c = Self::default();
        c.search.budget = budget;
        c.levels.search.budget = budget;
        c.exclusion_budget = budget.min(DEFAULT_BUDGET);
        c
    }
}

/// Outcome of one check: `Err` carries a failure message, budget errors turn
/// into indeterminate.
type Outcome = Result<std::result::Result<String, String>>;

fn status_of(o: Outcome) -> (Status, String) {
    match o {
        Ok(Ok(d)) => (Status::Pass, d),
        Ok(Err(d)) => (Status::Fail, d),
        Err(Error::BudgetExceeded { budget }) => (Status::Indeterminate, format!("budget of {budget} nodes exhausted")),
        Err(e) => (Status::Fail, e.to_string()),
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Ok(Err(format!($($msg)+)));
        }
    };
}

struct Ctx<'a> {
    cert: &'a Certificate,
    family: &'a FamilySpec,
    cfg: &'a VerifyConfig,
}

impl Ctx<'_> {
    fn stages(&self) -> &[Stage] {
        &self.cert.stages
    }

    fn side_point<'s>(&self, s: &'s Stage, side: Side) -> &'s ParamPoint {
        if side == Side::U {
            &s.u
        } else {
            &s.v
        }
    }

    fn structure(&self) -> Outcome {
        let st = self.stages();
        ensure!(st.len() >= 2, "need the seeds and at least one stage, found {} entries", st.len());
        self.family.validate()?;
        self.cert.omega.validate()?;
        let last = st.len() - 1;
        for (i, s) in st.iter().enumerate() {
            ensure!(s.k == i, "stage {i} is numbered {}", s.k);
            ensure!(s.u.0.len() == self.family.params(Side::U), "stage {i}: u has {} coordinates", s.u.0.len());
            ensure!(s.v.0.len() == self.family.params(Side::V), "stage {i}: v has {} coordinates", s.v.0.len());
            ensure!((i == 0) == s.delta.is_none(), "stage {i}: joint radius present iff k >= 1");
            ensure!((i == last) == s.eps.is_none() && (i == last) == s.eps_prime.is_none(), "stage {i}: radii present iff a later stage exists");
        }
        let g = &self.cert.guarantees;
        ensure!(g.delta_range == [st[0].n, st[last].n], "declared range {:?} but stages give [{}, {}]", g.delta_range, st[0].n, st[last].n);
        ensure!(g.no_overlap_upto == st[last - 1].level(), "declared no-overlap level {} but L_(K-1) = {}", g.no_overlap_upto, st[last - 1].level());
        Ok(Ok(format!("{} stages after the seeds", last)))
    }

    /// Each witness composes to an exact overlap at its own point.
    fn witnesses(&self) -> Outcome {
        for s in self.stages() {
            for (side, w, lvl) in [(Side::U, &s.witness_u, s.n), (Side::V, &s.witness_v, s.m)] {
                ensure!(w.a.len() == lvl && w.b.len() == lvl, "stage {}: witness length differs from level {lvl}", s.k);
                ensure!(w.a != w.b, "stage {}: witness words coincide", s.k);
                let ifs = self.family.instantiate(side, &self.side_point(s, side).0)?;
                let d = dist_strict(&compose_word(&ifs, &w.a)?, &compose_word(&ifs, &w.b)?);
                ensure!(d.is_zero(), "stage {}: {side:?} witness has distance {d}", s.k);
            }
        }
        Ok(Ok("all witnesses overlap exactly".into()))
    }

    /// Recorded levels are least levels.
    fn starred(&self) -> Outcome {
        for s in self.stages() {
            for (side, lvl) in [(Side::U, s.n), (Side::V, s.m)] {
                let got = self.family.h_level(side, &self.side_point(s, side).0, lvl, &self.cfg.levels)?;
                let got = got.map(|l| l.level);
                ensure!(got == Some(lvl), "stage {}: {side:?} least level is {got:?}, recorded {lvl}", s.k);
            }
        }
        Ok(Ok("recorded levels are least overlap levels".into()))
    }

    /// Inclusion radii hold and equal the canonical choice; joint radii
    /// have the canonical form.
    fn radii(&self) -> Outcome {
        let st = self.stages();
        let omega = &self.cert.omega;
        for k in 0..st.len() - 1 {
            let (s, next) = (&st[k], &st[k + 1]);
            let l = s.level();
            let ranges = [(Side::U, s.n, l, &s.eps, &s.witness_u), (Side::V, s.m, next.n, &s.eps_prime, &s.witness_v)];
            for (side, lo, hi, eps, w) in ranges {
                let eps = eps.as_ref().unwrap();
                ensure!(eps.is_positive(), "stage {k}: non-positive radius");
                let bound = omega.min_over(lo, hi)?;
                let pair = self.family.witness_pair(side, &w.a, &w.b)?;
                let p = &self.side_point(s, side).0;
                ensure!(certify_inclusion(&pair, p, eps, &bound), "stage {k}: {side:?} inclusion fails at radius {eps}");
                let canon = self.family.epsilon_radius(side, p, &pair, &bound, s.delta.as_ref())?;
                ensure!(&canon == eps, "stage {k}: {side:?} radius {eps} differs from the certified choice {canon}");
            }
            // the joint radius must be the start value halved some number of times
            let delta = next.delta.as_ref().unwrap();
            let q = &self.delta_start(k)? / delta;
            let pow2 = q.is_integer() && {
                let n = q.to_integer();
                n.sign() == num_bigint::Sign::Plus && (&n & (&n - 1u32)) == 0u32.into()
            };
            ensure!(pow2, "stage {}: joint radius {delta} is not a halving of its start value", k + 1);
        }
        Ok(Ok("inclusion radii re-certified".into()))
    }

    fn delta_start(&self, k: usize) -> Result<BigRational> {
        let (s, next) = (&self.stages()[k], &self.stages()[k + 1]);
        let gap = container_gap(&next.joint().0, &[(&s.u.0, s.eps.as_ref().unwrap()), (&s.v.0, s.eps_prime.as_ref().unwrap())])?;
        rational_below(&(&gap * &ExactScalar::from(BigRational::new(1.into(), 2.into()))))
    }

    /// Joint radii: the recorded radius is the first halving that certifies
    /// absence of overlaps up to `L_(k-1)` on the closed ball.
    fn exclusion(&self) -> Outcome {
        let st = self.stages();
        let tpl = self.family.template(Side::Joint)?;
        for k in 0..st.len() - 1 {
            let next = &st[k + 1];
            let delta = next.delta.as_ref().unwrap();
            let l = st[k].level();
            let canon = canonical_delta(&tpl, &next.joint().0, &self.delta_start(k)?, l, self.cfg.exclusion_budget)?;
            ensure!(&canon == delta, "stage {}: joint radius {delta} differs from the certified choice {canon}", k + 1);
        }
        Ok(Ok("joint balls avoid all overlaps up to the previous level".into()))
    }

    /// Closed joint balls sit inside the open balls of the previous
    /// stage, which sit inside its closed joint ball; levels increase.
    fn nesting(&self) -> Outcome {
        let st = self.stages();
        for k in 0..st.len() - 1 {
            let (s, next) = (&st[k], &st[k + 1]);
            let (eps, eps_p) = (s.eps.as_ref().unwrap(), s.eps_prime.as_ref().unwrap());
            let delta = ExactScalar::from(next.delta.clone().unwrap());
            for (c, p, r) in [(&s.u, &next.u, eps), (&s.v, &next.v, eps_p)] {
                let r = ExactScalar::from(r.clone());
                for (cj, pj) in c.0.iter().zip(&p.0) {
                    let reach = &(pj - cj).abs() + &delta;
                    ensure!(reach.cmp_exact(&r).is_lt(), "stage {}: closed joint ball leaves B({cj}, {r})", k + 1);
                }
                if let Some(d) = &s.delta {
                    ensure!(&r.cmp_exact(&ExactScalar::from(d.clone())).is_le(), "stage {k}: radius {r} exceeds the joint radius {d}");
                }
            }
            ensure!(next.n > s.level() && next.m > s.level(), "stage {}: levels ({}, {}) do not exceed L = {}", k + 1, next.n, next.m, s.level());
        }
        Ok(Ok("balls nested exactly; levels strictly increase".into()))
    }

    fn final_system(&self) -> Result<IFSInstance> {
        self.family.instantiate(Side::Joint, &self.stages().last().unwrap().joint().0)
    }

    /// `Delta_n <= omega_n` at the final point through recorded witnesses.
    fn delta_bounds(&self) -> Outcome {
        let ifs = self.final_system()?;
        let st = self.stages();
        let [lo, hi] = self.cert.guarantees.delta_range;
        // Prefixing both words with the same letter scales their strict
        // distance by its ratio; use the smallest ratio.
        let (c, ratio) = (0..ifs.len())
            .map(|i| (i, ifs.map(i).ratio.clone()))
            .min_by(|a, b| a.1.cmp_exact(&b.1))
            .unwrap();
        let letter = ifs.label(c).to_string();
        let mut values: Vec<(usize, ExactScalar)> = Vec::new();
        for s in st {
            for w in [&s.witness_u, &s.witness_v] {
                match dist_strict(&compose_word(&ifs, &w.a)?, &compose_word(&ifs, &w.b)?) {
                    StrictDistance::Finite(v) => values.push((w.a.len(), v)),
                    StrictDistance::Infinite => {}
                }
            }
        }
        if let Some((l, v)) = values.first() {
            // spot-check the scaling rule on one witness
            let w = &st[0].witness_u;
            let ext = |x: &Vec<String>| [vec![letter.clone()], x.clone()].concat();
            let d = dist_strict(&compose_word(&ifs, &ext(&w.a))?, &compose_word(&ifs, &ext(&w.b))?);
            ensure!(d == StrictDistance::Finite(v * &ratio) && *l == w.a.len(), "prefix scaling check failed");
        }
        let omega = &self.cert.omega;
        for n in lo..=hi {
            let best = values
                .iter()
                .filter(|(l, _)| *l <= n)
                .map(|(l, v)| v * &ratio.pow((n - l) as u32))
                .min_by(|a, b| a.cmp_exact(b));
            let Some(best) = best else {
                return Ok(Err(format!("no witness of level <= {n}")));
            };
            let w = omega.at(n)?;
            ensure!(best.cmp_exact(&ExactScalar::from(w.clone())).is_le(), "level {n}: witnessed distance {best} exceeds omega = {w}");
            if n <= self.cfg.full_delta_upto {
                let r = delta_n_with(&ifs, n, &self.cfg.search)?;
                if !r.certified {
                    return Err(Error::BudgetExceeded { budget: self.cfg.search.budget });
                }
                ensure!(r.delta <= StrictDistance::Finite(best.clone()), "level {n}: full Delta_n = {} above witness {best}", r.delta);
            }
        }
        Ok(Ok(format!("Delta_n <= omega_n for {lo} <= n <= {hi}")))
    }

    /// No exact overlap at the final point up to `L_(K-1)`.
    fn no_overlap(&self) -> Outcome {
        let ifs = self.final_system()?;
        let l = self.cert.guarantees.no_overlap_upto;
        match has_exact_overlap_upto_with(&ifs, l, &self.cfg.search)? {
            OverlapOutcome::Absent => Ok(Ok(format!("no exact overlap up to level {l}"))),
            OverlapOutcome::Found(w) => Ok(Err(format!("exact overlap at level {}: {:?} / {:?}", w.level, w.a, w.b))),
            OverlapOutcome::Indeterminate { .. } => Err(Error::BudgetExceeded { budget: self.cfg.search.budget }),
        }
    }
}

/// Runs every check in order; once one fails, the remaining ones are skipped.
pub fn verify(cert: &Certificate, cfg: &VerifyConfig) -> VerificationReport {
    let ctx = Ctx { cert, family: &cert.family, cfg };
    type CheckFn<'a> = fn(&Ctx<'a>) -> Outcome;
    let checks: [(&str, CheckFn); 8] = [
        ("structure", Ctx::structure),
        ("witnesses", Ctx::witnesses),
        ("levels", Ctx::starred),
        ("nesting", Ctx::nesting),
        ("radii", Ctx::radii),
        ("exclusion", Ctx::exclusion),
        ("delta-bounds", Ctx::delta_bounds),
        ("no-overlap", Ctx::no_overlap),
    ];
    let mut out = Vec::new();
    let mut failed = false;
    for (name, f) in checks {
        let (status, detail) = if failed { (Status::Skipped, "an earlier check failed".into()) } else { status_of(f(&ctx)) };
        failed |= status == Status::Fail;
        out.push(Check { name: name.into(), status, detail });
    }
    let overall = if out.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else if out.iter().any(|c| c.status == Status::Indeterminate) {
        Status::Indeterminate
    } else {
        Status::Pass
    };
    VerificationReport { overall, checks: out }
}

/// Loads a certificate, mapping syntax errors to `Parse` and shape errors to `Schema`.
pub fn load(path: &std::path::Path) -> Result<Certificate> {
    Certificate::load(path)
}

pub fn save(cert: &Certificate, path: &std::path::Path) -> Result<()> {
    cert.save(path)
}
