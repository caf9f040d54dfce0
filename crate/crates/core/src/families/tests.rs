use super::*;
use crate::exactnum::rational::rat;
use crate::exactnum::{isolate_real_roots, IntPolynomial};

fn q(x: BigRational) -> ExactScalar {
    ExactScalar::from(x)
}

fn ex1(l: BigRational) -> FamilySpec {
    FamilySpec::example1(l, 1)
}

fn golden() -> ExactScalar {
    let r = isolate_real_roots(&IntPolynomial::from_i64(&[-1, 1, 1]), &RatInterval::new(rat(1, 2), rat(1, 1))).unwrap();
    ExactScalar::from_algebraic(r[0].clone())
}

#[test]
fn spec_json() {
    let f: FamilySpec = serde_json::from_str(r#"{"variant":"example1","lambda":"1/3","dim":1,"merge":"union"}"#).unwrap();
    assert_eq!(f, ex1(rat(1, 3)));
    let back: FamilySpec = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(back, f);
    let f: FamilySpec = serde_json::from_str(r#"{"variant":"example2"}"#).unwrap();
    assert_eq!(f, FamilySpec::Example2);
    assert!(serde_json::from_str::<FamilySpec>(r#"{"variant":"example1","lambda":"1/3","extra":1}"#).is_err());
    assert!(ex1(rat(2, 3)).validate().is_err());
}

#[test]
fn half_has_level_two() {
    let f = ex1(rat(1, 2));
    let l = f.h_level(Side::U, &[q(rat(1, 2))], 6, &LevelConfig::default()).unwrap().unwrap();
    assert_eq!(l.level, 2);
    assert!(l.witness.value.is_zero());
    // closed form alone, beyond the search cap
    let l = f.h_level(Side::U, &[q(rat(9, 16))], 40, &LevelConfig::default()).unwrap().unwrap();
    assert_eq!(l.level, 5);
}

#[test]
fn closed_form_agrees_with_search() {
    let cfg = LevelConfig { search_cap: 5, ..LevelConfig::default() };
    for l in [rat(1, 2), rat(1, 3)] {
        let f = ex1(l);
        for p in -12i64..=12 {
            for d in 1..=12i64 {
                let x = rat(p, d);
                if p == 0 || x == rat(1, 1) {
                    continue;
                }
                // h_level asserts agreement internally
                f.h_level(Side::U, &[q(x.clone())], 5, &cfg).unwrap();
                f.h_level(Side::V, &[q(x)], 5, &cfg).unwrap();
            }
        }
    }
}

#[test]
fn domain_is_enforced() {
    let f = ex1(rat(1, 3));
    assert!(matches!(f.instantiate(Side::U, &[q(rat(1, 1))]), Err(Error::Domain(_))));
    assert!(matches!(FamilySpec::Example2.instantiate(Side::U, &[q(rat(1, 3))]), Err(Error::Domain(_))));
}

#[test]
fn joint_digits_stay_formal() {
    let f = ex1(rat(1, 3));
    let p = [q(rat(1, 3)), q(rat(1, 3))];
    let ifs = f.instantiate(Side::Joint, &p).unwrap();
    assert_eq!(ifs.len(), 6);
    let l = f.h_level(Side::Joint, &p, 3, &LevelConfig::default()).unwrap().unwrap();
    assert_eq!(l.level, 1);
    let p = [q(rat(4, 9)), q(rat(82, 243))];
    assert!(f.h_level(Side::Joint, &p, 2, &LevelConfig::default()).unwrap().is_none());
}

#[test]
fn primary_perturbation_examples() {
    let cfg = LevelConfig::default();
    let f = ex1(rat(1, 2));
    let u1 = f.perturb_primary(&[q(rat(1, 2))], 2, &rat(1, 10), 4096, &cfg).unwrap();
    assert_eq!(u1.0, vec![q(rat(9, 16))]);
    let f = ex1(rat(1, 3));
    let u1 = f.perturb_primary(&[q(rat(1, 3))], 2, &rat(1, 6), 4096, &cfg).unwrap();
    assert_eq!(u1.0, vec![q(rat(4, 9))]);
    let v1 = f.perturb_secondary(&u1.0, &[q(rat(1, 3))], 2, &rat(3, 512), 4096, &cfg).unwrap();
    assert_eq!(v1.0, vec![q(rat(82, 243))]);
}

#[test]
fn enumeration_matches_levels() {
    let cfg = LevelConfig::default();
    let w = RatInterval::new(rat(-3, 1), rat(3, 1));
    for l in [rat(1, 2), rat(1, 3), rat(1, 4)] {
        let f = ex1(l);
        let e = f.enumerate_h1(3, &w).unwrap();
        for x in &e {
            let lv = f.h_level(Side::U, std::slice::from_ref(x), 3, &cfg).unwrap();
            assert!(lv.is_some(), "{x}");
        }
        for p in -20i64..=20 {
            for d in 1..=20i64 {
                let x = rat(p, d);
                if p == 0 || x == rat(1, 1) || x <= w.lo || x >= w.hi {
                    continue;
                }
                let member = e.contains(&q(x.clone()));
                let lv = f.h_level(Side::U, &[q(x)], 3, &cfg).unwrap();
                assert_eq!(member, lv.is_some());
            }
        }
    }
}

#[test]
fn golden_in_example_two() {
    let cfg = LevelConfig::default();
    let f = FamilySpec::Example2;
    let l = f.h_level(Side::U, &[golden()], 5, &cfg).unwrap().unwrap();
    assert_eq!(l.level, 3);
    let e = f.enumerate_h1(3, &RatInterval::new(rat(1, 2), rat(1, 1))).unwrap();
    for x in &e {
        assert!(f.h_level(Side::U, std::slice::from_ref(x), 3, &cfg).unwrap().is_some());
    }
    let u1 = f.perturb_primary(&[golden()], 3, &rat(1, 20), 40, &cfg).unwrap();
    let lv = f.h_level(Side::U, &u1.0, 40, &cfg).unwrap().unwrap();
    assert!(lv.level > 3);
    assert!((&u1.0[0] - &golden()).abs().cmp_exact(&q(rat(1, 20))).is_lt());
}

#[test]
fn epsilon_for_example_one() {
    let f = ex1(rat(1, 3));
    let l = f.h_level(Side::U, &[q(rat(1, 3))], 4, &LevelConfig::default()).unwrap().unwrap();
    let pair = f.witness_pair(Side::U, &l.witness.a, &l.witness.b).unwrap();
    let e = f.epsilon_radius(Side::U, &[q(rat(1, 3))], &pair, &rat(1, 16), None).unwrap();
    assert_eq!(e, rat(1, 6));
}

#[test]
fn user_family_matches_example_two() {
    let js = r#"{"variant":"user","dim":1,"u_params":["u"],"v_params":["v"],
        "u_maps":[{"label":"u1","ratio":"u","t":["u"]},{"label":"u2","ratio":"u","t":["2*u"]}],
        "v_maps":[{"label":"v1","ratio":"v","t":["v"]},{"label":"v2","ratio":"v","t":["2*v"]}]}"#;
    let f: FamilySpec = serde_json::from_str(js).unwrap();
    f.validate().unwrap();
    for s in [Side::U, Side::V, Side::Joint] {
        assert_eq!(f.template(s).unwrap(), FamilySpec::Example2.template(s).unwrap());
    }
}
