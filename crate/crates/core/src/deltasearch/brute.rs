use std::cmp::Ordering;

use super::{cmp_interleaved, DeltaResult, WitnessPair};
use crate::error::{Error, Result};
use crate::simcore::{compose_indices, dist_strict, IFSInstance, SimilarityMap, StrictDistance};

pub const DEFAULT_ORACLE_CAP: u128 = 100_000;

pub fn delta_n_bruteforce(ifs: &IFSInstance, n: usize) -> Result<DeltaResult> {
    delta_n_bruteforce_with_cap(ifs, n, DEFAULT_ORACLE_CAP)
}

/// `Delta_n` by enumerating every word, grouping by exact ratio, and
/// comparing all pairs inside each group exactly. No floats, no pruning.
pub fn delta_n_bruteforce_with_cap(ifs: &IFSInstance, n: usize, cap: u128) -> Result<DeltaResult> {
    if n == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    let m = ifs.len();
    let words = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > cap {
        return Err(Error::OracleCap { words, cap });
    }
    let mut all: Vec<(Vec<usize>, SimilarityMap)> = Vec::with_capacity(words as usize);
    let mut w = vec![0usize; n];
    loop {
        all.push((w.clone(), compose_indices(ifs, &w)));
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            w[i] += 1;
            if w[i] < m {
                break;
            }
            w[i] = 0;
        }
        if w.iter().all(|&x| x == 0) {
            break;
        }
    }
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&x, &y| all[x].1.ratio.cmp_exact(&all[y].1.ratio).then_with(|| all[x].1.orth.cmp(&all[y].1.orth)).then(x.cmp(&y)));

    let mut best: Option<(StrictDistance, usize, usize)> = None;
    let mut confirmations = 0u64;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() {
            let (f, g) = (&all[order[start]].1, &all[order[end]].1);
            if f.ratio.cmp_exact(&g.ratio) != Ordering::Equal || f.orth != g.orth {
                break;
            }
            end += 1;
        }
        for x in start..end {
            for y in x + 1..end {
                // lexicographically smaller word first
                let (i, j) = if order[x] < order[y] { (order[x], order[y]) } else { (order[y], order[x]) };
                let d = dist_strict(&all[i].1, &all[j].1);
                confirmations += 1;
                let better = match &best {
                    None => true,
                    Some((bd, bi, bj)) => match d.cmp(bd) {
                        Ordering::Less => true,
                        Ordering::Equal => cmp_interleaved(&all[i].0, &all[j].0, &all[*bi].0, &all[*bj].0).is_lt(),
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        start = end;
    }
    let (delta, witness) = match best {
        Some((d, i, j)) => {
            let wp = WitnessPair { a: ifs.labels_of(&all[i].0), b: ifs.labels_of(&all[j].0), level: n, value: d.clone() };
            (d, Some(wp))
        }
        None => (StrictDistance::Infinite, None),
    };
    Ok(DeltaResult { level: n, delta, witness, nodes_explored: words as u64, exact_confirmations: confirmations, certified: true })
}
