use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cylsep::certificate::{Certificate, OmegaSpec};
use cylsep::certverify::{verify, VerifyConfig};
use cylsep::constructor::{run_partial, ConstructorConfig};
use cylsep::deltasearch::{
    delta_n_bruteforce_with_cap, delta_n_with, delta_profile_with, has_exact_overlap_upto_with, DeltaResult, OverlapOutcome,
    SearchConfig, DEFAULT_ORACLE_CAP,
};
use cylsep::exactnum::{format_rat, parse_rat, BigInt, BigRational, ExactScalar, RatInterval};
use cylsep::families::{FamilySpec, LevelConfig, MergeChoice, ParamPoint, Side};
use cylsep::simcore::{dim_upper_bounds, similarity_dimension, IFSInstance, StrictDistance};
use cylsep::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::*;

/// Optional JSON configuration; every field mirrors a command-line flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<FamilySpec>,
    pub ifs: Option<IFSInstance>,
    #[serde(default)]
    pub u: Vec<ExactScalar>,
    #[serde(default)]
    pub v: Vec<ExactScalar>,
    pub side: Option<Side>,
    pub omega: Option<OmegaArg>,
    pub budget: Option<u64>,
    pub threads: Option<usize>,
    pub level_cap: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum OmegaArg {
    Text(String),
    Spec(OmegaSpec),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path)?;
        serde_json::from_str(&s).map_err(json_err)
    }
}

fn json_err(e: serde_json::Error) -> Error {
    match e.classify() {
        serde_json::error::Category::Data => Error::Schema(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

pub struct Ctx {
    pub cfg: RunConfig,
    pub budget: Option<u64>,
}

impl Ctx {
    fn search(&self) -> SearchConfig {
        self.budget.map_or_else(SearchConfig::default, SearchConfig::with_budget)
    }

    fn levels(&self) -> LevelConfig {
        LevelConfig { search: self.search(), ..LevelConfig::default() }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_coords(raw: &[String]) -> Result<Vec<ExactScalar>> {
    let mut out = Vec::new();
    for s in raw {
        let s = s.trim();
        if s.starts_with('{') {
            out.push(serde_json::from_str(s).map_err(json_err)?);
        } else {
            for part in s.split(',') {
                out.push(ExactScalar::from(parse_rat(part.trim())?));
            }
        }
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Result<(BigRational, BigRational)> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("expected `lo,hi`, got `{s}`")))?;
    Ok((parse_rat(a.trim())?, parse_rat(b.trim())?))
}

fn family_of(t: &Target, ctx: &Ctx) -> Result<FamilySpec> {
    let Some(name) = t.family.as_deref() else {
        return ctx.cfg.family.clone().ok_or_else(|| usage("no family given (use --family or --config)"));
    };
    let f = match name {
        "example1" => {
            let lambda = t.lambda.as_deref().ok_or_else(|| usage("example1 needs --lambda"))?;
            let merge = match t.merge {
                Some(MergeArg::Full) => MergeChoice::Full,
                _ => MergeChoice::Union,
            };
            FamilySpec::Example1 { lambda: parse_rat(lambda)?, dim: t.dim.unwrap_or(1), merge }
        }
        "example2" => FamilySpec::Example2,
        path => serde_json::from_str(&fs::read_to_string(path)?).map_err(json_err)?,
    };
    f.validate()?;
    Ok(f)
}

enum Resolved {
    Point { family: FamilySpec, side: Side, point: Vec<ExactScalar> },
    Ifs(IFSInstance),
}

impl Resolved {
    fn ifs(&self) -> Result<IFSInstance> {
        match self {
            Resolved::Point { family, side, point } => family.instantiate(*side, point),
            Resolved::Ifs(i) => Ok(i.clone()),
        }
    }
}

fn points(t: &Target, ctx: &Ctx) -> Result<(Vec<ExactScalar>, Vec<ExactScalar>)> {
    let u = if t.u.is_empty() { ctx.cfg.u.clone() } else { parse_coords(&t.u)? };
    let v = if t.v.is_empty() { ctx.cfg.v.clone() } else { parse_coords(&t.v)? };
    Ok((u, v))
}

fn resolve(t: &Target, ctx: &Ctx) -> Result<Resolved> {
    if let Some(p) = &t.ifs {
        return Ok(Resolved::Ifs(serde_json::from_str(&fs::read_to_string(p)?).map_err(json_err)?));
    }
    if t.family.is_none() && ctx.cfg.family.is_none() {
        if let Some(i) = &ctx.cfg.ifs {
            return Ok(Resolved::Ifs(i.clone()));
        }
    }
    let family = family_of(t, ctx)?;
    let (u, v) = points(t, ctx)?;
    let side = match t.side {
        Some(SideArg::U) => Side::U,
        Some(SideArg::V) => Side::V,
        Some(SideArg::Joint) => Side::Joint,
        None => ctx.cfg.side.unwrap_or(match (u.is_empty(), v.is_empty()) {
            (false, false) => Side::Joint,
            (true, false) => Side::V,
            _ => Side::U,
        }),
    };
    let point = match side {
        Side::U => u,
        Side::V => v,
        Side::Joint => [u, v].concat(),
    };
    if point.len() != family.params(side) {
        return Err(usage(format!("{side:?} side of {} takes {} coordinates, got {}", family.name(), family.params(side), point.len())));
    }
    family.check_domain(side, &point)?;
    Ok(Resolved::Point { family, side, point })
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    })
}

fn emit(v: &Value) -> Result<i32> {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
    Ok(0)
}

fn scalar_json(x: &ExactScalar) -> Value {
    serde_json::to_value(x).expect("scalar serializes")
}

fn dist_json(d: &StrictDistance) -> Value {
    match d {
        StrictDistance::Finite(x) => scalar_json(x),
        StrictDistance::Infinite => Value::Null,
    }
}

fn rat_interval_json(iv: &RatInterval) -> Value {
    json!({
        "lo": format_rat(&iv.lo),
        "hi": format_rat(&iv.hi),
        "approx": [iv.lo.to_f64(), iv.hi.to_f64()],
    })
}

fn log2_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap().log2() + shift as f64
}

/// Outward-rounded enclosure of `log2 x` for `x > 0`.
fn log2_enclosure(x: &ExactScalar) -> (f64, f64) {
    let iv = x.enclose_bits(64);
    let l = |r: &BigRational| log2_big(r.numer()) - log2_big(r.denom());
    let lo = if iv.lo.is_positive() { l(&iv.lo) } else { f64::NEG_INFINITY };
    let hi = l(&iv.hi);
    let pad = |v: f64| 1e-12 * v.abs().max(1.0);
    (lo - pad(lo), hi + pad(hi))
}

fn profile_row(r: &DeltaResult) -> [String; 5] {
    let (num, den) = match &r.delta {
        StrictDistance::Infinite => (String::new(), "inf".to_string()),
        StrictDistance::Finite(ExactScalar::Rat(q)) => (q.numer().to_string(), q.denom().to_string()),
        StrictDistance::Finite(x) => (scalar_json(x).to_string(), "alg".to_string()),
    };
    let (a, b) = match &r.witness {
        Some(w) => (w.a.join(" "), w.b.join(" ")),
        None => (String::new(), String::new()),
    };
    [r.level.to_string(), num, den, a, b]
}

pub fn delta(a: &DeltaArgs, ctx: &Ctx) -> Result<i32> {
    let ifs = resolve(&a.target, ctx)?.ifs()?;
    let prof = delta_profile_with(&ifs, a.n_max, &ctx.search())?;
    let mut out = sink(a.output.as_deref())?;
    if a.plot_data {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "log2_lo", "log2_hi"]).map_err(csv_err)?;
        for r in &prof.results {
            let (lo, hi) = match &r.delta {
                StrictDistance::Finite(x) if x.is_zero() => (f64::NEG_INFINITY, f64::NEG_INFINITY),
                StrictDistance::Finite(x) => log2_enclosure(x),
                StrictDistance::Infinite => (f64::INFINITY, f64::INFINITY),
            };
            w.write_record([r.level.to_string(), lo.to_string(), hi.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
    } else if a.format == Format::Json {
        let rows: Vec<Value> = prof
            .results
            .iter()
            .map(|r| {
                json!({
                    "n": r.level,
                    "delta": dist_json(&r.delta),
                    "witness_a": r.witness.as_ref().map(|w| w.a.clone()),
                    "witness_b": r.witness.as_ref().map(|w| w.b.clone()),
                    "certified": r.certified,
                    "nodes": r.nodes_explored,
                })
            })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "profile": rows, "truncated": prof.truncated })).unwrap())?;
    } else {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "delta_num", "delta_den_or_inf", "witness_a", "witness_b"]).map_err(csv_err)?;
        for r in &prof.results {
            w.write_record(profile_row(r)).map_err(csv_err)?;
        }
        w.flush()?;
    }
    if prof.truncated {
        eprintln!("budget exhausted after {} levels; later levels omitted", prof.results.iter().filter(|r| r.certified).count());
        return Ok(2);
    }
    Ok(0)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn overlap(a: &OverlapArgs, ctx: &Ctx) -> Result<i32> {
    match resolve(&a.target, ctx)? {
        Resolved::Point { family, side, point } => match family.h_level(side, &point, a.n_max, &ctx.levels())? {
            Some(l) => emit(&json!({
                "level": l.level,
                "starred": l.starred,
                "witness_a": l.witness.a,
                "witness_b": l.witness.b,
            })),
            None => emit(&json!({ "level": null, "checked_upto": a.n_max })),
        },
        Resolved::Ifs(ifs) => match has_exact_overlap_upto_with(&ifs, a.n_max, &ctx.search())? {
            OverlapOutcome::Found(w) => emit(&json!({ "level": w.level, "starred": true, "witness_a": w.a, "witness_b": w.b })),
            OverlapOutcome::Absent => emit(&json!({ "level": null, "checked_upto": a.n_max })),
            OverlapOutcome::Indeterminate { level } => {
                emit(&json!({ "level": null, "checked_upto": level - 1, "indeterminate_at": level }))?;
                Ok(2)
            }
        },
    }
}

pub fn enum_h(a: &EnumArgs, ctx: &Ctx) -> Result<i32> {
    let family = family_of(&a.target, ctx)?;
    let window = match &a.window {
        Some(s) => {
            let (lo, hi) = parse_pair(s)?;
            RatInterval::new(lo, hi)
        }
        None => match family {
            FamilySpec::Example2 => RatInterval::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer(1.into())),
            _ => RatInterval::new(BigRational::zero(), BigRational::from_integer(1.into())),
        },
    };
    let xs = family.enumerate_h1(a.n, &window)?;
    emit(&json!({ "n": a.n, "count": xs.len(), "parameters": xs.iter().map(scalar_json).collect::<Vec<_>>() }))
}

pub fn dims(a: &DimsArgs, ctx: &Ctx) -> Result<i32> {
    let ifs = resolve(&a.target, ctx)?.ifs()?;
    let tol = parse_rat(&a.tol)?;
    if !tol.is_positive() {
        return Err(usage("--tol must be positive"));
    }
    let mut out = json!({ "similarity_dimension": rat_interval_json(&similarity_dimension(&ifs, &tol)) });
    if let Some(w) = &a.weights {
        let p = w.split(',').map(|s| parse_rat(s.trim())).collect::<Result<Vec<_>>>()?;
        let (entropy, lq) = dim_upper_bounds(&ifs, &p, &parse_rat(&a.q)?, &tol)?;
        out["entropy_bound"] = rat_interval_json(&entropy);
        out["lq_bound"] = rat_interval_json(&lq);
    }
    emit(&out)
}

pub fn construct(a: &ConstructArgs, ctx: &Ctx) -> Result<i32> {
    let family = family_of(&a.target, ctx)?;
    let omega = match (&a.omega, &ctx.cfg.omega) {
        (Some(s), _) | (None, Some(OmegaArg::Text(s))) => OmegaSpec::parse(s)?,
        (None, Some(OmegaArg::Spec(o))) => o.clone(),
        (None, None) => return Err(usage("construct needs --omega")),
    };
    let (u, v) = points(&a.target, ctx)?;
    let seeds = match (u.is_empty(), v.is_empty()) {
        (true, true) => None,
        (false, false) => Some((ParamPoint(u), ParamPoint(v))),
        _ => return Err(usage("give both --u and --v seeds, or neither")),
    };
    let mut cfg = ConstructorConfig { levels: ctx.levels(), ..ConstructorConfig::default() };
    if let Some(c) = a.level_cap.or(ctx.cfg.level_cap) {
        cfg.level_cap = c;
    }
    if let Some(b) = ctx.budget {
        cfg.exclusion_budget = b;
    }
    let run = run_partial(&family, &omega, seeds, a.stages, &cfg);
    let output = a.output.clone().or_else(|| ctx.cfg.output.clone());
    let write = |c: &Certificate| -> Result<()> {
        match &output {
            Some(p) => c.save(p),
            None => {
                print!("{}", c.to_json());
                Ok(())
            }
        }
    };
    match (run.certificate, run.error) {
        (Some(c), None) => {
            write(&c)?;
            eprintln!("{} stages; levels {:?}", c.stage_count(), c.stages.iter().map(|s| (s.n, s.m)).collect::<Vec<_>>());
            Ok(0)
        }
        (c, Some(e)) => {
            if let (Some(c), true) = (&c, a.partial) {
                write(c)?;
                eprintln!("wrote the {} completed stages", c.stage_count());
            }
            Err(e)
        }
        (None, None) => unreachable!("a run yields a certificate or an error"),
    }
}

pub fn verify_cmd(a: &VerifyArgs, ctx: &Ctx) -> Result<i32> {
    let cert = Certificate::load(&a.certificate)?;
    let mut cfg = ctx.budget.map_or_else(VerifyConfig::default, VerifyConfig::with_budget);
    if let Some(n) = a.full_delta_upto {
        cfg.full_delta_upto = n;
    }
    let report = verify(&cert, &cfg);
    match a.format {
        Format::Json => println!("{}", report.to_json()),
        _ => println!("{report}"),
    }
    Ok(report.exit_code())
}

pub fn oracle(a: &OracleArgs, ctx: &Ctx) -> Result<i32> {
    let ifs = resolve(&a.target, ctx)?.ifs()?;
    let cap = a.cap.unwrap_or(DEFAULT_ORACLE_CAP);
    let mut rows = Vec::new();
    let mut code = 0;
    for n in 1..=a.n_max {
        let fast = delta_n_with(&ifs, n, &ctx.search())?;
        let brute = match delta_n_bruteforce_with_cap(&ifs, n, cap) {
            Ok(b) => b,
            Err(Error::OracleCap { words, cap }) => {
                eprintln!("level {n}: {words} word pairs exceed the oracle cap {cap}; stopping");
                code = code.max(2);
                break;
            }
            Err(e) => return Err(e),
        };
        let agree = fast.certified && fast.delta == brute.delta;
        if !agree {
            code = 1;
        }
        rows.push(json!({ "n": n, "search": dist_json(&fast.delta), "brute": dist_json(&brute.delta), "agree": agree }));
    }
    emit(&json!({ "levels": rows }))?;
    Ok(code)
}
