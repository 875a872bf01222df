use proptest::prelude::*;

use qseries::catalog::{self, Expr};
use qseries::modularity::{
    common_c, find_scaling, geta_from_jquot, geta_scale, p2, robins_check, GEtaFactor, GEtaList,
};
use qseries::products::{geta_expand, jquot, JSpec};
use qseries::rat::{int, r};
use qseries::{Error, Monomial, Rational};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-500i64..500, 1i64..60).prop_map(|(n, d)| r(n, d))
}

fn arb_list() -> impl Strategy<Value = GEtaList> {
    (prop::sample::select(vec![6i64, 8, 12, 14, 20, 24, 56]), prop::collection::vec((1i64..64, 1i64..64, -4i64..=4), 1..6))
        .prop_map(|(n, raw)| {
            let divisors: Vec<i64> = (2..=n).filter(|d| n % d == 0).collect();
            let factors = raw
                .into_iter()
                .map(|(di, g, e)| {
                    let delta = divisors[di as usize % divisors.len()];
                    let g = 1 + g % (delta - 1);
                    let e = if 2 * g == delta { r(e, 2) } else { int(e) };
                    GEtaFactor { delta, g, r: e }
                })
                .collect();
            GEtaList::new(n, factors).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn p2_periodic_and_reflective(t in arb_rational()) {
        prop_assert_eq!(p2(t), p2(t + 1));
        prop_assert_eq!(p2(t), p2(int(1) - t));
    }

    #[test]
    fn parity_soundness(l in arb_list()) {
        let rep = robins_check(&l);
        if rep.is_modular {
            prop_assert!(rep.valinf.is_integer() && rep.valinf.to_integer() % 2 == 0);
            prop_assert!(rep.val0.is_integer() && rep.val0.to_integer() % 2 == 0);
        }
    }

    #[test]
    fn scaling_correctness(l in arb_list(), k in 1i64..=6) {
        let base = robins_check(&l);
        let scaled = geta_scale(&l, k);
        prop_assert_eq!(robins_check(&scaled).valinf, base.valinf * k);
        let s = find_scaling(&l);
        let at_level = GEtaList::new(s.level, geta_scale(&l, s.k).factors).unwrap();
        prop_assert!(robins_check(&at_level).is_modular, "{} scaled by {} at {}", l, s.k, s.level);
        prop_assert_eq!(s.level % (s.k * l.level), 0);
    }
}

fn jquot_terms(e: &Expr, out: &mut Vec<(Vec<JSpec>, Monomial)>) {
    match e {
        Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|c| jquot_terms(c, out)),
        Expr::JQuot { spec, pre } => out.push((spec.clone(), pre.clone())),
        _ => {}
    }
}

#[test]
fn cross_evaluator_on_product_terms() {
    let cat = catalog::builtin();
    let order = int(100);
    let mut checked = 0;
    for pat in ["exam7-?", "exam8-?", "exam9-?"] {
        for ident in cat.filter(Some(pat), None).unwrap().entries() {
            let mut terms = Vec::new();
            jquot_terms(&ident.rhs, &mut terms);
            for (spec, pre) in terms {
                let n = spec.iter().fold(1i64, |acc, s| num_integer::lcm(acc, s.modulus()));
                let (list, residual) = match geta_from_jquot(&spec, &pre, n) {
                    Ok(x) => x,
                    Err(Error::NotEtaProduct { .. }) => continue,
                    Err(e) => panic!("{}: {e}", ident.id),
                };
                let want = jquot(&spec, &pre, order).unwrap();
                let got = geta_expand(&list, order - residual)
                    .unwrap()
                    .mul_monomial(&Monomial::new(pre.coeff.clone(), residual));
                assert!(got.eq_upto(&want, order).unwrap().is_equal(), "{}: {list}", ident.id);
                checked += 1;
            }
        }
    }
    assert!(checked >= 9, "only {checked} product terms converted");
}

#[test]
fn common_c_reports_inconsistent_residuals() {
    let a = (vec![JSpec::j(2, 1), JSpec::j(1, -1)], Monomial::one());
    let b = (vec![JSpec::j(2, 1), JSpec::j(1, -1)], Monomial::q(r(1, 2)));
    // q^{1/24} (q^2;q^2)/(q;q) = eta(2 tau)/eta(tau)
    assert_eq!(common_c(std::slice::from_ref(&a), int(1)).unwrap(), r(1, 24));
    match common_c(&[a, b], int(1)) {
        Err(Error::InconsistentC(v)) => assert_eq!(v, vec![r(-1, 24), r(11, 24)]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn literal_session_input_list() {
    // The list typed into the session (g2 scaled by 21) differs from the list
    // echoed in its output; only the echoed list gives valinf = 128.
    let typed = GEtaList::parse(
        "[[1176,84,-3],[1176,252,-2],[1176,336,-1],[1176,420,-2],[1176,504,-1],[1176,588,-1]]",
        Some(7056),
    )
    .unwrap();
    let rep = robins_check(&typed);
    assert_eq!((rep.valinf, rep.val0, rep.is_modular), (int(32), int(-10), true));
}
