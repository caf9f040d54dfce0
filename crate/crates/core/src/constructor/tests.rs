use super::*;
use crate::exactnum::rational::rat;

fn q(x: BigRational) -> ParamPoint {
    ParamPoint(vec![ExactScalar::from(x)])
}

fn third() -> FamilySpec {
    FamilySpec::example1(rat(1, 3), 1)
}

#[test]
fn first_stage_for_thirds() {
    let cfg = ConstructorConfig::default();
    let omega = OmegaSpec::two_pow_neg_n_squared();
    let (s0, s1) = base_case(&third(), &omega, &q(rat(1, 3)), &q(rat(1, 3)), &cfg).unwrap();
    assert_eq!((s0.n, s0.m), (2, 2));
    assert_eq!(s0.eps, Some(rat(1, 6)));
    assert_eq!(s0.eps_prime, Some(rat(3, 512)));
    assert_eq!(s1.u, q(rat(4, 9)));
    assert_eq!(s1.v, q(rat(82, 243)));
    assert_eq!((s1.n, s1.m), (3, 6));
    let d = s1.delta.unwrap();
    // half the slack to the container boundary, first trial
    assert_eq!(d, (rat(3, 512) - rat(1, 243)) / BigRational::from_integer(2.into()));
}

#[test]
fn short_omega_table_is_rejected() {
    let cfg = ConstructorConfig::default();
    let omega = OmegaSpec::Table { values: vec![rat(1, 2)] };
    assert!(base_case(&third(), &omega, &q(rat(1, 3)), &q(rat(1, 3)), &cfg).is_err());
}

#[test]
fn degenerate_container_is_rejected() {
    let p = ParamPoint::join(&q(rat(2, 5)), &q(rat(3, 10)));
    let r = exclusion_radius(&third(), &p, 1, [(&q(rat(2, 5)), &rat(0, 1)), (&q(rat(3, 10)), &rat(1, 10))], 1000);
    assert!(r.is_err());
}

#[test]
fn run_is_deterministic() {
    let cfg = ConstructorConfig::default();
    let omega = OmegaSpec::two_pow_neg_n_squared();
    let seeds = Some((q(rat(1, 3)), q(rat(1, 3))));
    let a = run(&third(), &omega, seeds.clone(), 1, &cfg).unwrap();
    let b = run(&third(), &omega, seeds, 1, &cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.guarantees.delta_range, [2, 3]);
    assert_eq!(a.guarantees.no_overlap_upto, 2);
    assert_eq!(Certificate::from_json(&a.to_json()).unwrap(), a);
}

#[test]
fn constant_bound_still_raises_levels() {
    let cfg = ConstructorConfig::default();
    let omega = OmegaSpec::Table { values: vec![rat(1, 1); 64] };
    let c = run(&FamilySpec::example1(rat(1, 2), 1), &omega, None, 2, &cfg).unwrap();
    let s = &c.stages;
    assert!(s[1].n > s[0].level() && s[2].n > s[1].level());
    assert!(s[1].m > s[0].level() && s[2].m > s[1].level());
}

#[test]
fn default_seeds_have_least_level() {
    let (u, _) = default_seeds(&third()).unwrap();
    assert_eq!(u, q(rat(1, 4)));
}

#[test]
fn example_two_has_algebraic_stages() {
    let f = FamilySpec::Example2;
    let omega = OmegaSpec::parse("(1/2)^(n)").unwrap();
    let c = run(&f, &omega, None, 1, &ConstructorConfig::default()).unwrap();
    assert_eq!([c.stages[0].n, c.stages[1].n, c.stages[1].m], [3, 7, 13]);
    assert!(c.stages[1].u.0[0].as_rational().is_none());
    let back = Certificate::from_json(&c.to_json()).unwrap();
    assert_eq!(back, c);
    let rep = crate::certverify::verify(&back, &crate::certverify::VerifyConfig::default());
    assert!(rep.passed(), "{rep}");
}
