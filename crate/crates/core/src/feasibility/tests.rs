use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::rat;

fn instance(doc: Value) -> FeasibilityInstance {
    FeasibilityInstance::from_json(&doc).unwrap()
}

fn principal(target: &str, eps: &str) -> FeasibilityInstance {
    instance(json!({
        "generators": ["2", "12/35"],
        "divisors": [{"term": "x2", "target": target}],
        "points": [{}],
        "epsilon": eps,
    }))
}

#[test]
fn atoms_from_places() {
    let inst = principal("0", "1/1000");
    // primes 2, 3, 5, 7 and the archimedean atom
    assert_eq!(inst.atoms.len(), 5);
    assert_eq!(inst.atoms[0].class, AtomClass::Finite { p: 2u32.into() });
    assert_eq!(inst.atoms[4].values[1], -LogLinear::log_abs(&rat(12, 35)));
}

#[test]
fn principal_divisor_forced_to_zero() {
    let ok = solve_feasible(&principal("0", "1/1000")).unwrap();
    match &ok.verdict {
        // the standard measure: unit mass on every place
        Verdict::Feasible { weights } => assert!(weights.iter().all(|w| !w.is_negative())),
        other => panic!("{other:?}"),
    }
    let bad = principal("3/10", "1/1000000");
    let report = solve_feasible(&bad).unwrap();
    let Verdict::Infeasible { certificate } = &report.verdict else { panic!("{report:?}") };
    let sys = bad.constraint_system(256).unwrap();
    assert_eq!(verify_farkas(&sys.rows, &sys.rhs, &certificate.multipliers), Some(certificate.violation_bound.clone()));
    assert!(certificate.violation_bound.is_positive());
}

#[test]
fn standard_weights_are_feasible() {
    let inst = instance(json!({
        "generators": ["2"],
        "divisors": [{"term": "-1*min(x1, 0)", "target": "0"}],
        "atoms": [
            {"class": "finite", "p": 2, "values": ["1"]},
            {"class": "archimedean", "values": ["-log(2)"]}
        ],
        "epsilon": "1/100",
    }));
    // height of 2 prescribed as 0 contradicts the normalization
    assert!(!solve_feasible(&inst).unwrap().is_feasible());
    let mut inst = inst;
    inst.divisors[0].target = rat(69315, 100000);
    assert!(solve_feasible(&inst).unwrap().is_feasible());
}

#[test]
fn errors() {
    let no_two = instance(json!({"generators": ["3"], "points": [{}], "epsilon": "1/10"}));
    assert_eq!(solve_feasible(&no_two), Err(Error::MissingGenerator2));
    let tight = principal("0", "0");
    assert!(matches!(solve_feasible(&tight), Err(Error::ToleranceTooTight { .. })));
    let tiny = principal("0", "1/1000000000000000000000000000000000000000000000000000000000000000000000000");
    assert!(matches!(solve_feasible(&tiny), Err(Error::ToleranceTooTight { .. })));
    let no_arch = instance(json!({
        "generators": ["2"],
        "atoms": [{"class": "finite", "p": 2, "values": ["1"]}],
        "epsilon": "1/10",
    }));
    assert!(matches!(solve_feasible(&no_arch), Err(Error::InvalidInstance(_))));
}

#[test]
fn minimize_examples() {
    let norm = instance(json!({"generators": ["2", "1"], "points": [{}], "epsilon": "1/1000"}));
    let t = tropical::parse("-1*min(x1, x2)").unwrap();
    let r = minimize_functional(&norm, &t).unwrap();
    let log2 = ln_integer(&2u32.into(), 128).mid_rat();
    let v = r.objective.unwrap();
    assert!((&v - &log2).abs() <= rat(1, 1000) + rat(1, 1_000_000));

    let heights = instance(json!({
        "generators": ["2", "y"],
        "points": [{"y": "3"}, {"y": "5/4"}, {"y": "-7/10"}, {"y": "1/9"}],
        "epsilon": "1/1000",
    }));
    let h = tropical::parse("-1*min(x2, 0)").unwrap();
    assert!(!minimize_functional(&heights, &h).unwrap().objective.unwrap().is_negative());
    let p = minimize_functional(&heights, &TropTerm::var(2)).unwrap();
    assert!(p.objective.unwrap().is_zero());
}

#[test]
fn unbounded_objective() {
    // a free atom with u = (0, -1) contributes nothing to any constraint
    // except the product formula for y, which an opposite atom balances
    let inst = instance(json!({
        "generators": ["2", "y"],
        "atoms": [
            {"class": "archimedean", "values": ["-log(2)", "0"]},
            {"class": "finite", "p": 2, "values": ["1", "0"]},
            {"class": "free", "values": ["0", "-1"]},
            {"class": "free", "values": ["0", "1"]}
        ],
        "epsilon": "1/1000",
    }));
    let t = tropical::parse("min(x2, 0)").unwrap();
    assert_eq!(minimize_functional(&inst, &t), Err(Error::Unbounded));
}

#[test]
fn stable_under_higher_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let a = rat(rng.gen_range(1..500), rng.gen_range(1..500));
        let target = rat(rng.gen_range(-3..4), 10);
        let inst = instance(json!({
            "generators": ["2", a.to_string()],
            "divisors": [{"term": "min(x2, 0)", "target": target.to_string()}],
            "points": [{}],
            "epsilon": "1/100",
        }));
        let lo = solve_feasible_at(&inst, 256).unwrap();
        let hi = solve_feasible_at(&inst, 512).unwrap();
        assert!(inst.epsilon > &lo.perturbation_bound * rat(2, 1));
        assert_eq!(lo.is_feasible(), hi.is_feasible());
    }
}

#[test]
fn more_atoms_never_hurt() {
    let base = instance(json!({
        "generators": ["2", "y"],
        "divisors": [{"term": "-1*min(x2, 0)", "target": "3/2"}],
        "points": [{"y": "4"}],
        "epsilon": "1/10",
    }));
    let mut wider = base.clone();
    let extra = atoms_at_point(&base.generators, &[("y".to_string(), rat(9, 2))].into_iter().collect()).unwrap();
    wider.atoms.extend(extra);
    let a = solve_feasible(&base).unwrap().is_feasible();
    let b = solve_feasible(&wider).unwrap().is_feasible();
    assert!(!a || b);
}

#[test]
fn json_round_trip() {
    let inst = principal("1/3", "1/100");
    assert_eq!(FeasibilityInstance::from_json(&inst.to_json()).unwrap(), inst);
}
