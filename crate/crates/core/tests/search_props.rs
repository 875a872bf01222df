use proptest::prelude::*;

use qseries::products::{jquot, JSpec};
use qseries::rat::{int, r};
use qseries::search::fit_product;
use qseries::{Error, Monomial, PSeries};

fn arb_jquot() -> impl Strategy<Value = (i64, Vec<JSpec>)> {
    (2i64..=14).prop_flat_map(|m| {
        let divisors: Vec<i64> = (1..=m).filter(|d| m % d == 0).collect();
        let full = prop::collection::vec((prop::sample::select(divisors), -2i64..=2), 0..3);
        let pairs = prop::collection::vec((1..m, -2i64..=2), 0..3);
        (Just(m), full, pairs).prop_map(|(m, full, pairs)| {
            let mut spec: Vec<JSpec> = full.into_iter().filter(|&(_, p)| p != 0).map(|(d, p)| JSpec::j(d, p)).collect();
            spec.extend(pairs.into_iter().filter(|&(a, p)| p != 0 && 2 * a != m).map(|(a, p)| JSpec::jam(a, m, p)));
            (m, spec)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn fit_round_trip((m, spec) in arb_jquot(), c in 1i64..=3, v in -2i64..=2) {
        let order = int(10 * m);
        let pre = Monomial::of(int(c), int(v));
        let f = jquot(&spec, &pre, order).unwrap();
        let fit = fit_product(&f, m, f.order()).unwrap().expect("J-quotients have periodic exponents");
        prop_assert_eq!(fit.q_power, int(v));
        let form = fit.jquot_form.clone().expect("symmetric pattern");
        let back = jquot(&form, &pre, order).unwrap();
        prop_assert!(back.eq_upto(&f, f.order()).unwrap().is_equal(), "{:?} fitted as {:?}", spec, form);
        let expanded = fit.expand(f.order()).unwrap();
        prop_assert!(expanded.eq_upto(&f, f.order()).unwrap().is_equal());
    }
}

#[test]
fn short_window_is_an_error() {
    let f = PSeries::from_ints(&[1, -1, -1], int(3));
    assert!(matches!(fit_product(&f, 5, int(3)), Err(Error::InsufficientTruncation { .. })));
    assert!(matches!(fit_product(&PSeries::zero(int(20)), 2, int(20)), Err(Error::InvalidArgument(_))));
}

#[test]
fn fractional_lattice_is_rejected() {
    let f = PSeries::from_monomial(&Monomial::q(r(1, 3)), int(10)).add(&PSeries::one(int(10)));
    assert!(matches!(fit_product(&f, 2, int(10)), Err(Error::NonIntegralExponents)));
}
