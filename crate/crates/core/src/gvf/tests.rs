use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::algebra::rat;
use crate::places::expr::parse_element;
use crate::places::{places_over, PlaceKind};
use crate::tropical::parse;

fn q() -> Gvf {
    Gvf::new(Carrier::Rationals)
}

fn quad(d: i64) -> Gvf {
    Gvf::new(Carrier::quadratic(BigInt::from(d)).unwrap())
}

fn elems(g: &Gvf, xs: &[&str]) -> Vec<FieldElem> {
    xs.iter().map(|x| parse_element(g.carrier(), x).unwrap()).collect()
}

fn log(n: i64) -> LogLinear {
    LogLinear::log_abs(&rat(n, 1))
}

#[test]
fn min_on_rationals() {
    let g = q();
    let v = g.r_t(&parse("min(x1, x2)").unwrap(), &elems(&g, &["4", "6"])).unwrap();
    assert!(v.is_exact());
    assert_eq!(v.exact, -log(3));
}

#[test]
fn linear_terms_integrate_to_zero() {
    for (g, xs) in [
        (q(), vec!["12/35"]),
        (quad(2), vec!["1 + sqrt(2)"]),
        (Gvf::new(Carrier::function_field(2).unwrap()), vec!["t"]),
    ] {
        let a = elems(&g, &xs);
        assert!(g.r_t(&TropTerm::var(1), &a).unwrap().is_zero_within_radius());
    }
    let f2 = Gvf::new(Carrier::function_field(2).unwrap());
    let v = f2.r_t(&parse("x1 + x2").unwrap(), &elems(&f2, &["t", "t+1"])).unwrap();
    assert!(v.is_exact() && v.exact.is_zero());
}

#[test]
fn height_examples() {
    let h = q().height(&Carrier::Rationals.from_int(2)).unwrap();
    assert!(h.is_exact());
    assert_eq!(h.exact, log(2));
    assert!(h.to_string().starts_with("0.693147180559945309417232121458 ± "), "{h}");
    assert!(h.to_string().ends_with("(= log(2))"));

    let g = quad(2);
    let h = g.height(&g.carrier().generator().unwrap()).unwrap();
    assert!(!h.is_exact());
    let expect = log(2).scale(&rat(1, 2)).to_ball(256);
    assert!(h.rendered().sub(&expect).contains_zero());
    assert!(h.rendered().radius().to_f64_upper() < 1e-60);

    let f = Gvf::new(Carrier::function_field(2).unwrap());
    let h = f.height(&f.carrier().generator().unwrap()).unwrap();
    assert!(h.is_exact());
    assert_eq!(h.exact, LogLinear::from_rat(rat(1, 1)));
}

#[test]
fn product_formula_examples() {
    let r = q().check_product_formula(&FieldElem::Rat(rat(12, 35))).unwrap();
    assert!(r.is_exact() && r.exact.is_zero());
    let g = quad(2);
    let r = g.check_product_formula(&parse_element(g.carrier(), "1 + sqrt(2)").unwrap()).unwrap();
    assert!(r.exact.is_zero());
    assert!(r.arch.contains_zero());
    let f = Gvf::new(Carrier::function_field(3).unwrap());
    let r = f.check_product_formula(&parse_element(f.carrier(), "(t^2+1)/t").unwrap()).unwrap();
    assert!(r.is_exact() && r.exact.is_zero());
    // a non-unit: the finite part and the norm term cancel exactly
    let r = g.check_product_formula(&parse_element(g.carrier(), "3/7 - 5*sqrt(2)").unwrap()).unwrap();
    assert!(r.exact.is_zero());
    assert!(r.arch.contains_zero() && r.arch.radius().to_f64_upper() < 1e-60);
}

#[test]
fn linearity_examples() {
    let g = q();
    let a = elems(&g, &["4", "6"]);
    let (s, m) = g.check_linearity(&TropTerm::var(1), &TropTerm::var(2), &rat(2, 1), &a).unwrap();
    assert!(s.is_exact() && s.exact.is_zero() && m.exact.is_zero());
    let t = parse("min(x1, x2)").unwrap();
    let (s, m) = g.check_linearity(&t, &t, &rat(2, 1), &a).unwrap();
    assert!(s.exact.is_zero() && m.exact.is_zero());
}

#[test]
fn positivity_examples() {
    let g = q();
    let a = elems(&g, &["2"]);
    match g.check_positivity(&TropTerm::height(), &a).unwrap() {
        Positivity::Nonnegative { value } => assert_eq!(value.exact, log(2)),
        other => panic!("{other:?}"),
    }
    match g.check_positivity(&TropTerm::var(1), &a).unwrap() {
        Positivity::PremiseFails { witness, .. } => assert!(witness.is_archimedean()),
        other => panic!("{other:?}"),
    }
    let t = parse("min(x1,x2) - min(x1,x2)").unwrap();
    match g.check_positivity(&t, &elems(&g, &["3", "5/2"])).unwrap() {
        Positivity::Nonnegative { value } => assert!(value.exact.is_zero()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn galois_examples() {
    let g = quad(2);
    let a = elems(&g, &["sqrt(2)"]);
    let b = elems(&g, &["-sqrt(2)"]);
    assert!(g.check_galois_invariance(&TropTerm::height(), &a, &b).unwrap().is_zero_within_radius());
    let a = elems(&g, &["1 + sqrt(2)"]);
    let b = elems(&g, &["1 - sqrt(2)"]);
    assert!(g.check_galois_invariance(&TropTerm::var(1), &a, &b).unwrap().is_zero_within_radius());
    assert_eq!(g.check_galois_invariance(&TropTerm::var(1), &a, &a), Err(Error::NotConjugate));
}

#[test]
fn roots_of_unity_have_exact_zero_height() {
    for (d, z) in [(-1, "sqrt(-1)"), (-3, "(1 + sqrt(-3))/2"), (-3, "(-1 + sqrt(-3))/2")] {
        let g = quad(d);
        let h = g.height(&parse_element(g.carrier(), z).unwrap()).unwrap();
        assert!(h.is_exact() && h.exact.is_zero(), "{z}: {h}");
    }
    let h = q().height(&FieldElem::Rat(rat(-1, 1))).unwrap();
    assert!(h.is_exact() && h.exact.is_zero());
}

#[test]
fn extra_places_do_not_change_integrals() {
    let g = quad(-7);
    let a = elems(&g, &["(1 + sqrt(-7))/2", "3 - sqrt(-7)/5"]);
    let t = parse("min(x1, 2*x2) + -1*min(x2, 0)").unwrap();
    let base = g.r_t(&t, &a).unwrap();
    let mut more = g.support(&a).unwrap();
    more.extend(
        places_over(g.carrier(), &[13u32.into(), 17u32.into()])
            .unwrap()
            .into_iter()
            .filter(|p| matches!(p.kind, PlaceKind::Finite { .. })),
    );
    let wider = g.r_t_on(&more, &t, &a).unwrap();
    assert_eq!(wider.exact, base.exact);
    assert_eq!(wider.arch, base.arch);
}

#[test]
fn sequential_matches_parallel() {
    let g = quad(5);
    let a = elems(&g, &["(1 + sqrt(5))/2", "7/3 + sqrt(5)"]);
    let t = parse("min(x1, x2, 0)").unwrap();
    let par = g.clone().with_execution(Execution::Parallel { threads: 3 }).r_t(&t, &a).unwrap();
    let seq = g.with_execution(Execution::Sequential).r_t(&t, &a).unwrap();
    assert_eq!(par, seq);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn height_of_powers(n in -300i64..300, d in 1i64..300, k in 1u32..4) {
        prop_assume!(n != 0);
        let g = q();
        let a = FieldElem::Rat(rat(n, d));
        let ak = g.carrier().pow(&a, i64::from(k)).unwrap();
        let h = g.height(&a).unwrap();
        prop_assert_eq!(g.height(&ak).unwrap().exact, h.exact.scale(&rat(i64::from(k), 1)));
        prop_assert!(h.exact.signum() != std::cmp::Ordering::Less);
    }

    #[test]
    fn quadratic_heights_nonnegative(a in -40i64..40, b in -40i64..40, c in 1i64..20) {
        prop_assume!(a != 0 || b != 0);
        let g = quad(-5);
        let x = FieldElem::Alg(vec![rat(a, c), rat(b, c)]);
        prop_assert!(g.height(&x).unwrap().is_nonnegative_within_radius());
    }
}
