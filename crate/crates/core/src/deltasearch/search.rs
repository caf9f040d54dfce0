use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AO};
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use rayon::prelude::*;

use super::{cmp_interleaved, DeltaProfile, DeltaResult, OverlapOutcome, SearchConfig, WitnessPair};
use crate::error::{Error, Result};
use crate::exactnum::rational::rat_to_f64_down;
use crate::exactnum::{ExactScalar, FInterval, ScalarKey};
use crate::simcore::{sup_norm, IFSInstance, SignedPermutation, StrictDistance};

const SHARDS: usize = 16;
const MAX_REFINE_BITS: u32 = 4096;

/// Count vectors (over distinct ratio values) of full words, grouped by the
/// exact product they give.
struct RatioClasses {
    class_of: HashMap<Vec<u16>, usize>,
    members: Vec<Vec<Vec<u16>>>,
    memo: Mutex<HashMap<(Vec<u16>, Vec<u16>), bool>>,
}

impl RatioClasses {
    fn build(values: &[ExactScalar], n: usize) -> Self {
        let nr = values.len();
        let mut vecs = Vec::new();
        let mut cur = vec![0u16; nr];
        fn rec(i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            if i + 1 == cur.len() {
                cur[i] = left as u16;
                out.push(cur.clone());
                return;
            }
            for c in 0..=left {
                cur[i] = c as u16;
                rec(i + 1, left - c, cur, out);
            }
        }
        rec(0, n, &mut cur, &mut vecs);
        let mut prods: Vec<(ExactScalar, Vec<u16>)> = vecs
            .into_iter()
            .map(|c| {
                let p = c.iter().zip(values).fold(ExactScalar::one(), |acc, (&k, r)| &acc * &r.pow(k as u32));
                (p, c)
            })
            .collect();
        prods.sort_by(|x, y| x.0.cmp_exact(&y.0));
        let mut class_of = HashMap::new();
        let mut members: Vec<Vec<Vec<u16>>> = Vec::new();
        let mut last: Option<ExactScalar> = None;
        for (p, c) in prods {
            let same = last.as_ref().is_some_and(|l| l.cmp_exact(&p).is_eq());
            if !same {
                members.push(Vec::new());
                last = Some(p);
            }
            class_of.insert(c.clone(), members.len() - 1);
            members.last_mut().unwrap().push(c);
        }
        RatioClasses { class_of, members, memo: Mutex::new(HashMap::new()) }
    }

    /// Can prefixes with these counts still end in equal ratio products?
    fn feasible(&self, ca: &[u16], cb: &[u16]) -> bool {
        if ca == cb {
            return true;
        }
        let key = (ca.to_vec(), cb.to_vec());
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return v;
        }
        let ge = |f: &[u16], c: &[u16]| f.iter().zip(c).all(|(x, y)| x >= y);
        let v = self.members.iter().any(|cls| cls.iter().any(|f| ge(f, ca)) && cls.iter().any(|f| ge(f, cb)));
        self.memo.lock().unwrap().insert(key, v);
        v
    }
}

struct Prep {
    m: usize,
    n: usize,
    dim: usize,
    ratio_idx: Vec<usize>,
    ratios: Vec<ExactScalar>,
    orth: Vec<SignedPermutation>,
    t: Vec<Vec<ExactScalar>>,
    /// `tail[r][j]` encloses coordinate `j` of the translation of every word
    /// of length `r`, seen through any orthogonal part.
    tail: Vec<Vec<FInterval>>,
    classes: Option<RatioClasses>,
}

fn hull(a: FInterval, b: FInterval) -> FInterval {
    FInterval::new(a.lo.min(b.lo), a.hi.max(b.hi))
}

impl Prep {
    fn new(ifs: &IFSInstance, n: usize) -> Self {
        let m = ifs.len();
        let dim = ifs.dim();
        let mut distinct: Vec<ExactScalar> = Vec::new();
        let mut ratio_idx = Vec::with_capacity(m);
        for (_, map) in ifs.maps() {
            match distinct.iter().position(|r| r.cmp_exact(&map.ratio).is_eq()) {
                Some(p) => ratio_idx.push(p),
                None => {
                    ratio_idx.push(distinct.len());
                    distinct.push(map.ratio.clone());
                }
            }
        }
        let ratios: Vec<ExactScalar> = ifs.maps().iter().map(|(_, f)| f.ratio.clone()).collect();
        let orth: Vec<SignedPermutation> = ifs.maps().iter().map(|(_, f)| f.orth.clone()).collect();
        let t: Vec<Vec<ExactScalar>> = ifs.maps().iter().map(|(_, f)| f.t.clone()).collect();
        let all_identity = orth.iter().all(|o| o.is_identity());
        let rf: Vec<FInterval> = ratios.iter().map(|r| r.to_f64_interval()).collect();
        let tf: Vec<Vec<FInterval>> = t.iter().map(|v| v.iter().map(|x| x.to_f64_interval()).collect()).collect();
        let zero = FInterval::point(0.0);
        let mut tail = vec![vec![zero; dim]];
        for r in 1..=n {
            let prev = &tail[r - 1];
            let row: Vec<FInterval> = if all_identity {
                (0..dim)
                    .map(|j| {
                        (0..m)
                            .map(|i| tf[i][j] + rf[i] * prev[j])
                            .reduce(hull)
                            .unwrap()
                    })
                    .collect()
            } else {
                let pm = prev.iter().map(|x| x.mag()).fold(0.0, f64::max);
                let b = (0..m)
                    .map(|i| {
                        let tm = tf[i].iter().map(|x| x.mag()).fold(0.0, f64::max);
                        (FInterval::point(tm) + rf[i] * FInterval::point(pm)).hi
                    })
                    .fold(0.0, f64::max);
                vec![FInterval::new(-b, b); dim]
            };
            tail.push(row);
        }
        let classes = if distinct.len() > 1 { Some(RatioClasses::build(&distinct, n)) } else { None };
        Prep { m, n, dim, ratio_idx, ratios, orth, t, tail, classes }
    }

    fn nr(&self) -> usize {
        self.classes.as_ref().map_or(1, |c| c.members[0][0].len())
    }
}

#[derive(Clone)]
struct Node {
    eq: bool,
    a: Vec<usize>,
    b: Vec<usize>,
    ca: Vec<u16>,
    cb: Vec<u16>,
    pa: ExactScalar,
    pb: ExactScalar,
    oa: SignedPermutation,
    ob: SignedPermutation,
    d: Vec<ExactScalar>,
}

#[derive(Hash, PartialEq, Eq)]
struct StateKey {
    eq: bool,
    ca: Vec<u16>,
    cb: Vec<u16>,
    oa: SignedPermutation,
    ob: SignedPermutation,
    d: Vec<ScalarKey>,
}

impl Node {
    fn key(&self) -> StateKey {
        StateKey {
            eq: self.eq,
            ca: self.ca.clone(),
            cb: self.cb.clone(),
            oa: self.oa.clone(),
            ob: self.ob.clone(),
            d: self.d.iter().map(|x| x.key()).collect(),
        }
    }

    fn prefix(&self) -> Vec<u16> {
        self.a.iter().zip(&self.b).flat_map(|(&x, &y)| [x as u16, y as u16]).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Min,
    Zero,
}

struct Best {
    value: ExactScalar,
    a: Vec<usize>,
    b: Vec<usize>,
}

struct Shared<'p> {
    prep: &'p Prep,
    cfg: &'p SearchConfig,
    mode: Mode,
    nodes: AtomicU64,
    budget: u64,
    exact: AtomicU64,
    exhausted: AtomicBool,
    inc_hi: AtomicU64,
    best: Mutex<Option<Best>>,
    seen: Vec<Vec<Mutex<HashMap<StateKey, Vec<u16>>>>>,
}

impl<'p> Shared<'p> {
    fn new(prep: &'p Prep, cfg: &'p SearchConfig, mode: Mode, budget: u64) -> Self {
        let inc = if mode == Mode::Zero { 0.0 } else { f64::INFINITY };
        Shared {
            prep,
            cfg,
            mode,
            nodes: AtomicU64::new(0),
            budget,
            exact: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
            inc_hi: AtomicU64::new(inc.to_bits()),
            best: Mutex::new(None),
            seen: (0..=prep.n).map(|_| (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect()).collect(),
        }
    }

    fn root(&self) -> Node {
        let p = self.prep;
        Node {
            eq: true,
            a: vec![],
            b: vec![],
            ca: vec![0; p.nr()],
            cb: vec![0; p.nr()],
            pa: ExactScalar::one(),
            pb: ExactScalar::one(),
            oa: SignedPermutation::identity(p.dim),
            ob: SignedPermutation::identity(p.dim),
            d: vec![ExactScalar::zero(); p.dim],
        }
    }

    fn child(&self, node: &Node, i: usize, j: usize) -> Node {
        let p = self.prep;
        let ta = node.oa.apply(&p.t[i]);
        let tb = node.ob.apply(&p.t[j]);
        let d = (0..p.dim).map(|k| &(&node.d[k] + &(&node.pa * &ta[k])) - &(&node.pb * &tb[k])).collect();
        let mut a = node.a.clone();
        a.push(i);
        let mut b = node.b.clone();
        b.push(j);
        let mut ca = node.ca.clone();
        let mut cb = node.cb.clone();
        if p.classes.is_some() {
            ca[p.ratio_idx[i]] += 1;
            cb[p.ratio_idx[j]] += 1;
        }
        Node {
            eq: node.eq && i == j,
            a,
            b,
            ca,
            cb,
            pa: &node.pa * &p.ratios[i],
            pb: &node.pb * &p.ratios[j],
            oa: node.oa.compose(&p.orth[i]),
            ob: node.ob.compose(&p.orth[j]),
            d,
        }
    }

    fn incumbent(&self) -> f64 {
        f64::from_bits(self.inc_hi.load(AO::Relaxed))
    }

    /// Certified lower bound on the sup-norm difference of any completion.
    fn lower_bound(&self, node: &Node) -> f64 {
        let p = self.prep;
        let r = p.n - node.a.len();
        let pa = node.pa.to_f64_interval();
        let pb = node.pb.to_f64_interval();
        let mut lb = 0.0f64;
        for j in 0..p.dim {
            let tail = p.tail[r][j];
            let df = node.d[j].to_f64_interval();
            let mut v = (df + pa * tail - pb * tail).mig();
            if v == 0.0 && !node.d[j].is_rational() && df.contains_zero() {
                v = self.refined_bound(&node.d[j], (pa.hi + pb.hi) * tail.mag());
            }
            lb = lb.max(v);
        }
        lb
    }

    /// Same bound with the difference enclosed by rational refinement, for
    /// algebraic values below float resolution.
    fn refined_bound(&self, d: &ExactScalar, tail_hi: f64) -> f64 {
        let tail_hi = tail_hi.next_up().next_up();
        if !tail_hi.is_finite() {
            return 0.0;
        }
        let bits = if tail_hi > 0.0 { (-tail_hi.log2()).max(0.0) as u32 + 40 } else { 128 };
        let bits = bits.clamp(64, MAX_REFINE_BITS);
        let iv = d.enclose_bits(bits);
        if iv.contains_zero() {
            return 0.0;
        }
        let mig = iv.lo.abs().min(iv.hi.abs());
        let t = BigRational::from_f64(tail_hi).unwrap_or_else(BigRational::zero);
        let lb = mig - t;
        if lb.is_positive() {
            rat_to_f64_down(&lb).max(0.0)
        } else {
            0.0
        }
    }

    fn visit(&self, node: &Node) -> bool {
        let key = node.key();
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let shard = (h.finish() as usize) % SHARDS;
        let prefix = node.prefix();
        let mut tab = self.seen[node.a.len()][shard].lock().unwrap();
        match tab.get(&key) {
            Some(p) if *p <= prefix => false,
            _ => {
                tab.insert(key, prefix);
                true
            }
        }
    }

    fn admissible(&self, node: &Node) -> bool {
        let p = self.prep;
        if self.mode == Mode::Zero {
            if let Some(b) = self.best.lock().unwrap().as_ref() {
                let k = node.a.len();
                if cmp_interleaved(&node.a, &node.b, &b.a[..k], &b.b[..k]).is_gt() {
                    return false;
                }
            }
        }
        if let Some(c) = &p.classes {
            if !node.eq && !c.feasible(&node.ca, &node.cb) {
                return false;
            }
        }
        if node.a.len() == p.n {
            return true;
        }
        if self.cfg.prune {
            let inc = self.incumbent();
            if self.lower_bound(node) > inc {
                return false;
            }
            if !self.visit(node) {
                return false;
            }
        }
        true
    }

    fn tick(&self) -> bool {
        let c = self.nodes.fetch_add(1, AO::Relaxed) + 1;
        if c > self.budget {
            self.exhausted.store(true, AO::Relaxed);
            return false;
        }
        true
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        let m = self.prep.m;
        let mut out = Vec::new();
        for i in 0..m {
            for j in (if node.eq { i } else { 0 })..m {
                if self.exhausted.load(AO::Relaxed) || !self.tick() {
                    return out;
                }
                let c = self.child(node, i, j);
                if self.admissible(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn dfs(&self, node: &Node) {
        if node.a.len() == self.prep.n {
            self.leaf(node);
            return;
        }
        let m = self.prep.m;
        for i in 0..m {
            for j in (if node.eq { i } else { 0 })..m {
                if self.exhausted.load(AO::Relaxed) || !self.tick() {
                    return;
                }
                let c = self.child(node, i, j);
                if self.admissible(&c) {
                    self.dfs(&c);
                }
            }
        }
    }

    fn leaf(&self, node: &Node) {
        if node.eq || node.oa != node.ob {
            return;
        }
        if let Some(c) = &self.prep.classes {
            if c.class_of[&node.ca] != c.class_of[&node.cb] {
                return;
            }
        }
        let value = sup_norm(&node.d);
        let vf = value.to_f64_interval();
        match self.mode {
            Mode::Zero => {
                if !value.is_zero() {
                    return;
                }
            }
            Mode::Min => {
                if vf.lo > self.incumbent() {
                    return;
                }
            }
        }
        self.exact.fetch_add(1, AO::Relaxed);
        let mut best = self.best.lock().unwrap();
        let replace = match best.as_ref() {
            None => true,
            Some(b) => match value.cmp_exact(&b.value) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => cmp_interleaved(&node.a, &node.b, &b.a, &b.b).is_lt(),
                std::cmp::Ordering::Greater => false,
            },
        };
        if replace {
            if self.mode == Mode::Min {
                let cur = self.incumbent();
                if vf.hi < cur {
                    self.inc_hi.store(vf.hi.to_bits(), AO::Relaxed);
                }
            }
            *best = Some(Best { value, a: node.a.clone(), b: node.b.clone() });
        }
    }

    fn run(&self) {
        let root = self.root();
        if self.cfg.parallel {
            let mut frontier = vec![root];
            while frontier.first().is_some_and(|f| f.a.len() < self.prep.n.min(2)) {
                frontier = frontier.iter().flat_map(|f| self.children(f)).collect();
            }
            frontier.par_iter().for_each(|f| self.dfs(f));
        } else {
            self.dfs(&root);
        }
    }
}

fn witness(ifs: &IFSInstance, n: usize, b: &Best) -> WitnessPair {
    WitnessPair { a: ifs.labels_of(&b.a), b: ifs.labels_of(&b.b), level: n, value: StrictDistance::Finite(b.value.clone()) }
}

pub fn delta_n(ifs: &IFSInstance, n: usize) -> Result<DeltaResult> {
    delta_n_with(ifs, n, &SearchConfig::default())
}

/// Exact `Delta_n`: the least strict distance between compositions of two
/// distinct words of length `n`, with the interleaved-lexicographically least
/// attaining pair as witness. A budget overrun is reported through
/// `certified = false` with the best value found as an upper bound.
pub fn delta_n_with(ifs: &IFSInstance, n: usize, cfg: &SearchConfig) -> Result<DeltaResult> {
    if n == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    let prep = Prep::new(ifs, n);
    let sh = Shared::new(&prep, cfg, Mode::Min, cfg.budget);
    sh.run();
    let best = sh.best.into_inner().unwrap();
    let (delta, witness) = match best {
        Some(b) => (StrictDistance::Finite(b.value.clone()), Some(witness(ifs, n, &b))),
        None => (StrictDistance::Infinite, None),
    };
    Ok(DeltaResult {
        level: n,
        delta,
        witness,
        nodes_explored: sh.nodes.load(AO::Relaxed).min(cfg.budget),
        exact_confirmations: sh.exact.load(AO::Relaxed),
        certified: !sh.exhausted.load(AO::Relaxed),
    })
}

pub fn delta_profile(ifs: &IFSInstance, n_max: usize) -> Result<DeltaProfile> {
    delta_profile_with(ifs, n_max, &SearchConfig::default())
}

/// `Delta_1 .. Delta_{n_max}`; the sequence is non-increasing (appending a
/// common letter to a pair never increases its distance), which is asserted.
pub fn delta_profile_with(ifs: &IFSInstance, n_max: usize, cfg: &SearchConfig) -> Result<DeltaProfile> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let all: Vec<Result<DeltaResult>> = if cfg.parallel {
        (1..=n_max).into_par_iter().map(|n| delta_n_with(ifs, n, cfg)).collect()
    } else {
        (1..=n_max).map(|n| delta_n_with(ifs, n, cfg)).collect()
    };
    let mut results = Vec::new();
    let mut truncated = false;
    for r in all {
        let r = r?;
        if !r.certified {
            truncated = true;
            results.push(r);
            break;
        }
        if let Some(prev) = results.last() {
            let prev: &DeltaResult = prev;
            assert!(r.delta <= prev.delta, "Delta increased from level {} to {}", prev.level, r.level);
        }
        results.push(r);
    }
    Ok(DeltaProfile { results, truncated })
}

pub fn has_exact_overlap_upto(ifs: &IFSInstance, l: usize) -> Result<OverlapOutcome> {
    has_exact_overlap_upto_with(ifs, l, &SearchConfig::default())
}

/// Least-level exact overlap up to level `l`, or certified absence. The
/// budget is shared across levels.
pub fn has_exact_overlap_upto_with(ifs: &IFSInstance, l: usize, cfg: &SearchConfig) -> Result<OverlapOutcome> {
    if l == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    let mut used = 0u64;
    for n in 1..=l {
        let prep = Prep::new(ifs, n);
        let sh = Shared::new(&prep, cfg, Mode::Zero, cfg.budget.saturating_sub(used));
        sh.run();
        used += sh.nodes.load(AO::Relaxed);
        if let Some(b) = sh.best.into_inner().unwrap() {
            return Ok(OverlapOutcome::Found(witness(ifs, n, &b)));
        }
        if sh.exhausted.load(AO::Relaxed) {
            return Ok(OverlapOutcome::Indeterminate { level: n });
        }
    }
    Ok(OverlapOutcome::Absent)
}
