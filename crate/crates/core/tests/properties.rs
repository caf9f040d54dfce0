use cylsep::deltasearch::{delta_n, delta_n_bruteforce, delta_n_with, SearchConfig};
use cylsep::exactnum::rational::rat;
use cylsep::exactnum::{isolate_real_roots, ExactScalar, IntPolynomial, RatInterval};
use cylsep::families::{FamilySpec, LevelConfig, Side};
use cylsep::simcore::{compose, dist_strict, IFSInstance, SignedPermutation, SimilarityMap, StrictDistance};
use proptest::prelude::*;

fn golden() -> ExactScalar {
    let r = isolate_real_roots(&IntPolynomial::from_i64(&[-1, 1, 1]), &RatInterval::new(rat(1, 2), rat(1, 1))).unwrap();
    ExactScalar::from_algebraic(r[0].clone())
}

/// `a + b g` with small rational `a`, `b` and `g` the golden ratio conjugate.
fn field_elem() -> impl Strategy<Value = ExactScalar> {
    (-20i64..=20, 1i64..=9, -20i64..=20, 1i64..=9)
        .prop_map(|(a, da, b, db)| &ExactScalar::from(rat(a, da)) + &(&ExactScalar::from(rat(b, db)) * &golden()))
}

fn ratio() -> impl Strategy<Value = ExactScalar> {
    prop_oneof![Just(rat(1, 2)), Just(rat(1, 3)), Just(rat(2, 5))].prop_map(ExactScalar::from)
}

fn translation() -> impl Strategy<Value = ExactScalar> {
    (-20i64..=20, 1i64..=20).prop_map(|(p, q)| ExactScalar::from(rat(p, q)))
}

fn maps(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(ExactScalar, ExactScalar)>> {
    prop::collection::vec((ratio(), translation()), k)
}

fn ifs_from(maps: &[(ExactScalar, ExactScalar)], prefix: &str) -> IFSInstance {
    IFSInstance::new(
        1,
        maps.iter()
            .enumerate()
            .map(|(i, (r, t))| (format!("{prefix}{i}"), SimilarityMap::affine(r.clone(), t.clone()).unwrap()))
            .collect(),
    )
    .unwrap()
}

fn le(a: &StrictDistance, b: &StrictDistance) -> bool {
    a <= b
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn field_ops_agree_with_floats(x in field_elem(), y in field_elem()) {
        let tol = 1e-9;
        prop_assert!(((&x + &y).to_f64() - (x.to_f64() + y.to_f64())).abs() < tol);
        prop_assert!(((&x * &y).to_f64() - x.to_f64() * y.to_f64()).abs() < tol);
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y).checked_div(&y).unwrap(), &x);
        }
        let d = x.to_f64() - y.to_f64();
        if d.abs() > tol {
            prop_assert_eq!(x.cmp_exact(&y), d.partial_cmp(&0.0).unwrap());
        }
    }

    #[test]
    fn scalars_round_trip(x in field_elem()) {
        let s = serde_json::to_string(&x).unwrap();
        let back: ExactScalar = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn signed_permutations_form_a_group(p in Just(vec![0usize, 1, 2]).prop_shuffle(), s in prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 3)) {
        let o = SignedPermutation::new(p, s).unwrap();
        prop_assert!(o.compose(&o.inverse()).is_identity());
        prop_assert!(o.inverse().compose(&o).is_identity());
    }

    #[test]
    fn composition_is_associative(m in maps(3..=3)) {
        let f: Vec<SimilarityMap> = m.iter().map(|(r, t)| SimilarityMap::affine(r.clone(), t.clone()).unwrap()).collect();
        let l = compose(&compose(&f[0], &f[1]).unwrap(), &f[2]).unwrap();
        let r = compose(&f[0], &compose(&f[1], &f[2]).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(dist_strict(&f[0], &f[1]), dist_strict(&f[1], &f[0]));
    }

    #[test]
    fn search_matches_brute_force(m in maps(2..=3), n in 1usize..=4) {
        let ifs = ifs_from(&m, "m");
        let fast = delta_n(&ifs, n).unwrap();
        let brute = delta_n_bruteforce(&ifs, n).unwrap();
        prop_assert_eq!(&fast.delta, &brute.delta);
        if let Some(w) = &fast.witness {
            prop_assert_eq!(&w.recompute(&ifs).unwrap(), &fast.delta);
        }
        let plain = delta_n_with(&ifs, n, &SearchConfig { prune: false, ..SearchConfig::default() }).unwrap();
        prop_assert_eq!(plain.delta, fast.delta);
    }

    #[test]
    fn profile_decreases(m in maps(2..=4)) {
        let ifs = ifs_from(&m, "m");
        let mut prev = StrictDistance::Infinite;
        for n in 1..=4 {
            let d = delta_n(&ifs, n).unwrap().delta;
            prop_assert!(le(&d, &prev), "level {}: {} above {}", n, d, prev);
            prev = d;
        }
    }

    #[test]
    fn union_is_at_most_each_part(a in maps(2..=2), b in maps(2..=2), n in 1usize..=4) {
        let (p, q) = (ifs_from(&a, "a"), ifs_from(&b, "b"));
        let u = p.union(&q).unwrap();
        let du = delta_n(&u, n).unwrap().delta;
        prop_assert!(le(&du, &delta_n(&p, n).unwrap().delta));
        prop_assert!(le(&du, &delta_n(&q, n).unwrap().delta));
    }

    #[test]
    fn closed_form_levels_match_search(p in -30i64..=30, d in 1i64..=30, lam in prop_oneof![Just(2i64), Just(3)]) {
        let x = rat(p, d);
        prop_assume!(p != 0 && x != rat(1, 1));
        let f = FamilySpec::example1(rat(1, lam), 1);
        // h_level checks the closed form against the search within the search cap
        let cfg = LevelConfig { search_cap: 4, ..LevelConfig::default() };
        let l = f.h_level(Side::U, &[ExactScalar::from(x)], 4, &cfg).unwrap();
        if let Some(l) = l {
            prop_assert!(l.witness.value.is_zero());
        }
    }
}
