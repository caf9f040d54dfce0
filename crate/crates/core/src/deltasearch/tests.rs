use super::*;
use crate::exactnum::rational::{int, rat};
use crate::exactnum::{isolate_real_roots, ExactScalar, IntPolynomial, RatInterval};
use crate::simcore::SimilarityMap;

fn q(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from(rat(n, d))
}

fn affine_ifs(maps: &[(ExactScalar, ExactScalar)]) -> IFSInstance {
    IFSInstance::new(
        1,
        maps.iter()
            .enumerate()
            .map(|(i, (r, t))| (format!("{}", (b'A' + i as u8) as char), SimilarityMap::affine(r.clone(), t.clone()).unwrap()))
            .collect(),
    )
    .unwrap()
}

fn dyadic() -> IFSInstance {
    affine_ifs(&[(q(1, 2), q(0, 1)), (q(1, 2), q(1, 2))])
}

fn ternary() -> IFSInstance {
    affine_ifs(&[(q(1, 3), q(0, 1)), (q(1, 3), q(1, 3))])
}

fn golden() -> ExactScalar {
    let p = IntPolynomial::from_i64(&[-1, 1, 1]);
    ExactScalar::from_algebraic(isolate_real_roots(&p, &RatInterval::new(rat(1, 2), int(1))).unwrap().remove(0))
}

fn golden_ifs() -> IFSInstance {
    let g = golden();
    affine_ifs(&[(g.clone(), g.clone()), (g.clone(), &g * &q(2, 1))])
}

fn fin(x: ExactScalar) -> StrictDistance {
    StrictDistance::Finite(x)
}

#[test]
fn dyadic_and_ternary_levels() {
    let r = delta_n(&dyadic(), 5).unwrap();
    assert!(r.certified);
    assert_eq!(r.delta, fin(q(1, 32)));
    let w = r.witness.unwrap();
    assert_eq!(w.recompute(&dyadic()).unwrap(), fin(q(1, 32)));
    assert_eq!(delta_n(&ternary(), 4).unwrap().delta, fin(q(1, 81)));
}

#[test]
fn golden_overlap_at_three() {
    let ifs = golden_ifs();
    let r = delta_n(&ifs, 3).unwrap();
    assert!(r.delta.is_zero());
    let w = r.witness.unwrap();
    assert!(w.recompute(&ifs).unwrap().is_zero());
    // positive at levels one and two
    assert_eq!(delta_n(&ifs, 1).unwrap().delta, fin(golden()));
    assert!(!delta_n(&ifs, 2).unwrap().delta.is_zero());
}

#[test]
fn profiles() {
    let p = delta_profile(&dyadic(), 3).unwrap();
    let v: Vec<_> = p.results.iter().map(|r| r.delta.clone()).collect();
    assert_eq!(v, vec![fin(q(1, 2)), fin(q(1, 4)), fin(q(1, 8))]);
    let distinct = affine_ifs(&[(q(1, 2), q(0, 1)), (q(1, 3), q(1, 2))]);
    assert_eq!(delta_n(&distinct, 1).unwrap().delta, StrictDistance::Infinite);
    let p = delta_profile(&golden_ifs(), 3).unwrap();
    assert!(!p.truncated);
    assert!(p.results[2].delta.is_zero());
    assert!(!p.results[1].delta.is_zero());
}

#[test]
fn overlap_search() {
    match has_exact_overlap_upto(&golden_ifs(), 3).unwrap() {
        OverlapOutcome::Found(w) => assert_eq!(w.level, 3),
        o => panic!("{o:?}"),
    }
    assert!(matches!(has_exact_overlap_upto(&dyadic(), 8).unwrap(), OverlapOutcome::Absent));
    let dup = affine_ifs(&[(q(1, 2), q(0, 1)), (q(1, 2), q(0, 1)), (q(1, 2), q(1, 2))]);
    match has_exact_overlap_upto(&dup, 1).unwrap() {
        OverlapOutcome::Found(w) => {
            assert_eq!(w.level, 1);
            assert_eq!((w.a, w.b), (vec!["A".to_string()], vec!["B".to_string()]));
        }
        o => panic!("{o:?}"),
    }
}

#[test]
fn budget_is_reported() {
    let cfg = SearchConfig { budget: 10, ..SearchConfig::default() };
    let r = delta_n_with(&ternary(), 8, &cfg).unwrap();
    assert!(!r.certified);
    assert!(matches!(has_exact_overlap_upto_with(&ternary(), 8, &cfg).unwrap(), OverlapOutcome::Indeterminate { .. }));
}

#[test]
fn oracle_agreement_small() {
    for n in 1..=6 {
        let a = delta_n(&dyadic(), n).unwrap();
        let b = delta_n_bruteforce(&dyadic(), n).unwrap();
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.witness, b.witness);
    }
    let a = delta_n(&golden_ifs(), 3).unwrap();
    let b = delta_n_bruteforce(&golden_ifs(), 3).unwrap();
    assert_eq!(a.delta, b.delta);
    assert_eq!(a.witness, b.witness);
    assert!(matches!(delta_n_bruteforce_with_cap(&dyadic(), 20, 1000), Err(crate::Error::OracleCap { .. })));
}

#[test]
fn pruning_does_not_change_minimum() {
    let ifs = affine_ifs(&[(q(1, 3), q(0, 1)), (q(2, 5), q(1, 4)), (q(1, 3), q(3, 7))]);
    for n in 1..=4 {
        let a = delta_n(&ifs, n).unwrap();
        let cfg = SearchConfig { prune: false, parallel: false, ..SearchConfig::default() };
        let b = delta_n_with(&ifs, n, &cfg).unwrap();
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.witness, b.witness);
    }
}

#[test]
fn two_dimensional_with_reflection() {
    use crate::simcore::SignedPermutation;
    let swap = SignedPermutation::new(vec![1, 0], vec![1, -1]).unwrap();
    let maps = vec![
        ("A".to_string(), SimilarityMap::new(q(1, 2), SignedPermutation::identity(2), vec![q(0, 1), q(0, 1)]).unwrap()),
        ("B".to_string(), SimilarityMap::new(q(1, 2), swap.clone(), vec![q(1, 2), q(0, 1)]).unwrap()),
        ("C".to_string(), SimilarityMap::new(q(1, 2), swap, vec![q(0, 1), q(1, 3)]).unwrap()),
    ];
    let ifs = IFSInstance::new(2, maps).unwrap();
    for n in 1..=4 {
        let a = delta_n(&ifs, n).unwrap();
        let b = delta_n_bruteforce(&ifs, n).unwrap();
        assert_eq!(a.delta, b.delta, "level {n}");
        assert_eq!(a.witness, b.witness);
    }
}
