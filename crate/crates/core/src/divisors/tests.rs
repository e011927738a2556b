use num_bigint::BigInt;

use super::*;
use crate::algebra::rat;
use crate::places::PlaceKind;

fn q(n: i64, d: i64) -> FieldElem {
    FieldElem::Rat(rat(n, d))
}

fn div(n: i64) -> LatticeDivisor {
    LatticeDivisor::principal(q(n, 1))
}

fn finite_beta(d: &LatticeDivisor, p: u32) -> Rat {
    let k = Carrier::Rationals;
    let place = crate::places::decompose_prime(&k, &p.into()).unwrap().remove(0);
    beta(&k, &place, d, 64).unwrap().as_rat().unwrap().clone()
}

fn log(n: i64) -> LogLinear {
    LogLinear::log_abs(&rat(n, 1))
}

#[test]
fn wedge_reindexes() {
    let d = div(4).wedge(&div(6));
    assert_eq!(d.term.to_string(), "min(x1, x2)");
    assert_eq!(d.generators, vec![q(4, 1), q(6, 1)]);
    assert_eq!(finite_beta(&d, 2), rat(1, 1));
    assert_eq!(finite_beta(&d, 3), rat(0, 1));
    let assoc_l = div(2).wedge(&div(3)).wedge(&div(5));
    let assoc_r = div(2).wedge(&div(3).wedge(&div(5)));
    for p in [2, 3, 5, 7] {
        assert_eq!(finite_beta(&assoc_l, p), finite_beta(&assoc_r, p));
        assert_eq!(finite_beta(&div(10).wedge(&div(10)), p), finite_beta(&div(10), p));
    }
}

#[test]
fn add_and_scale() {
    let s = div(2).add(&div(3));
    assert_eq!(finite_beta(&s, 2), rat(1, 1));
    assert_eq!(finite_beta(&s, 3), rat(1, 1));
    assert_eq!(finite_beta(&div(4).scale(&rat(1, 2)), 2), rat(1, 1));
    assert_eq!(finite_beta(&div(12).scale(&rat(0, 1)), 2), rat(0, 1));
}

#[test]
fn effectivity_examples() {
    let g = Gvf::default();
    match is_effective_on_support(&g, &div(2).wedge(&div(1))).unwrap() {
        Effectivity::NotEffective { witness, beta } => {
            assert!(matches!(witness.kind, PlaceKind::Archimedean { .. }));
            assert_eq!(beta.as_loglinear().unwrap(), -log(2));
        }
        other => panic!("{other:?}"),
    }
    let hd = div(7).wedge(&div(1)).neg();
    assert_eq!(is_effective_on_support(&g, &hd).unwrap(), Effectivity::Effective { evidence: Evidence::Proven });
    assert_eq!(is_effective_on_support(&g, &div(1)).unwrap(), Effectivity::Effective { evidence: Evidence::Proven });
}

#[test]
fn functional_examples() {
    let g = Gvf::default();
    assert!(functional_value(&g, &div(35)).unwrap().exact.is_zero());
    let norm = div(2).wedge(&div(1)).neg();
    assert_eq!(functional_value(&g, &norm).unwrap().exact, log(2));
    assert_eq!(functional_value(&g, &div(4).wedge(&div(6))).unwrap().exact, -log(3));
}

#[test]
fn point_heights() {
    let t = Template::parse(&["y"], "-1*min(x1, 0)").unwrap();
    let g = Gvf::default();
    let x = PointSpec::new(Carrier::Rationals, [("y".to_string(), q(2, 1))]);
    assert_eq!(height_at_point(&g, &t, &x).unwrap().exact, log(2));

    let k = Carrier::quadratic(BigInt::from(2)).unwrap();
    let gk = Gvf::new(k.clone());
    let x = PointSpec::new(k.clone(), [("y".to_string(), k.generator().unwrap())]);
    let h = height_at_point(&gk, &t, &x).unwrap();
    assert!(h.rendered().sub(&log(2).scale(&rat(1, 2)).to_ball(256)).contains_zero());

    let t2 = Template::parse(&["y", "1 - y"], "min(x1, x2)").unwrap();
    let x = PointSpec::new(Carrier::Rationals, [("y".to_string(), q(1, 1))]);
    assert_eq!(height_at_point(&g, &t2, &x), Err(Error::PointOnSupport { index: 1 }));
    let t3 = Template::parse(&["1/(y - 1)"], "x1").unwrap();
    assert_eq!(height_at_point(&g, &t3, &x), Err(Error::PointOnSupport { index: 0 }));
}

#[test]
fn json_round_trip() {
    let k = Carrier::quadratic(BigInt::from(-1)).unwrap();
    let d = LatticeDivisor::principal(k.generator().unwrap()).wedge(&LatticeDivisor::principal(k.from_int(3)));
    let v = divisor_to_json(&k, &d);
    assert_eq!(divisor_from_json(&k, &v).unwrap(), d);
    let t = Template::parse(&["y", "1-y"], "min(x1,x2)").unwrap();
    assert_eq!(Template::from_json(&t.to_json()).unwrap(), t);
    let x = PointSpec::new(k.clone(), [("y".to_string(), k.from_int(5))]);
    assert_eq!(PointSpec::from_json(&k, &x.to_json()).unwrap(), x);
}
