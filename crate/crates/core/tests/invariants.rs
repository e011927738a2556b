//! Cross-module invariants through the public API.

use gvf_core::algebra::{rat, Rat};
use gvf_core::divisors::{functional_value, LatticeDivisor};
use gvf_core::exec::Execution;
use gvf_core::gvf::Gvf;
use gvf_core::places::{support_places, Carrier, FieldElem};
use gvf_core::tropical::{self, TropTerm};
use num_bigint::BigInt;
use proptest::prelude::*;

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (-5000i64..5000, 1i64..400).prop_filter("nonzero", |(a, _)| *a != 0).prop_map(|(a, b)| rat(a, b))
}

fn quadratic_field() -> impl Strategy<Value = Carrier> {
    prop::sample::select(vec![-7i64, -5, -3, -2, -1, 2, 3, 5, 6, 10])
        .prop_map(|d| Carrier::quadratic(BigInt::from(d)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_height_is_log_of_larger_term(q in nonzero_rat()) {
        let h = Gvf::default().height(&FieldElem::Rat(q.clone())).unwrap();
        let a: f64 = q.numer().to_string().parse::<f64>().unwrap().abs();
        let b: f64 = q.denom().to_string().parse().unwrap();
        prop_assert!((h.to_f64() - a.max(b).ln()).abs() < 1e-12);
    }

    #[test]
    fn height_of_inverse_and_powers(k in quadratic_field(), a in nonzero_rat(), b in nonzero_rat(), n in 1i64..4) {
        let x = k.normalize(&FieldElem::Alg(vec![a, b])).unwrap();
        let gvf = Gvf::new(k.clone());
        let h = gvf.height(&x).unwrap();
        let inv = gvf.height(&k.inv(&x).unwrap()).unwrap();
        let pow = gvf.height(&k.pow(&x, n).unwrap()).unwrap();
        prop_assert!(h.sub(&inv).rendered().abs_upper().to_f64_upper() < 1e-20);
        let scaled = h.scale(&rat(n, 1));
        prop_assert!(pow.sub(&scaled).rendered().abs_upper().to_f64_upper() < 1e-20);
    }

    #[test]
    fn product_formula_over_quadratic_fields(k in quadratic_field(), a in nonzero_rat(), b in nonzero_rat()) {
        let x = k.normalize(&FieldElem::Alg(vec![a, b])).unwrap();
        let r = Gvf::new(k).check_product_formula(&x).unwrap();
        prop_assert!(r.exact.is_zero());
        prop_assert!(r.arch.contains_zero());
    }

    #[test]
    fn principal_divisors_have_value_zero_over_q(a in nonzero_rat(), b in nonzero_rat()) {
        // div(a) + div(b) - div(ab) is the zero divisor as a function on places
        let gvf = Gvf::default();
        let ab = FieldElem::Rat(&a * &b);
        let d = LatticeDivisor::new(
            vec![FieldElem::Rat(a), FieldElem::Rat(b), ab],
            tropical::parse("x1 + x2 - x3").unwrap(),
        ).unwrap();
        let v = functional_value(&gvf, &d).unwrap();
        prop_assert!(v.is_exact() && v.exact.is_zero());
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let k = Carrier::quadratic(BigInt::from(-5)).unwrap();
    let a = vec![
        FieldElem::Alg(vec![rat(2 * 3 * 7 * 11, 13 * 17), rat(19, 23)]),
        FieldElem::Alg(vec![rat(-29, 31), rat(37 * 41, 43)]),
        FieldElem::Rat(rat(360, 77)),
    ];
    let t = tropical::parse("max(x1, 2*x2) - min(x1, x2, x3, 0)").unwrap();
    let seq = Gvf::new(k.clone()).with_execution(Execution::Sequential).r_t(&t, &a).unwrap();
    for threads in [0, 2, 3] {
        let par = Gvf::new(k.clone()).with_execution(Execution::Parallel { threads }).r_t(&t, &a).unwrap();
        assert_eq!(par, seq);
    }
}

#[test]
fn support_places_cover_every_nonzero_valuation() {
    let k = Carrier::quadratic(BigInt::from(3)).unwrap();
    let x = FieldElem::Alg(vec![rat(5, 2), rat(7, 9)]);
    let places = support_places(&k, std::slice::from_ref(&x)).unwrap();
    // the height integral over the support alone equals the full height,
    // which is also the height of the inverse
    let gvf = Gvf::new(k.clone());
    let on_support = gvf.r_t_on(&places, &TropTerm::height(), std::slice::from_ref(&x)).unwrap();
    let h = gvf.height(&x).unwrap();
    assert_eq!(on_support, h);
    let h_inv = gvf.height(&k.inv(&x).unwrap()).unwrap();
    assert!(h.sub(&h_inv).rendered().contains_zero());
}
