use proptest::prelude::*;

use qseries::catalog::{self, verify};
use qseries::nahm::{multi_sum, nahm_sum, MultiSum, NahmTriple};
use qseries::rat::{int, r};
use qseries::{Monomial, PSeries, Rational};

fn arb_triple(rank: usize) -> impl Strategy<Value = NahmTriple> {
    let entries = rank * (rank + 1) / 2;
    (
        prop::collection::vec((-3i64..=6, 1i64..=3), entries),
        prop::collection::vec((-4i64..=4, 1i64..=2), rank),
        (-2i64..=2, 1i64..=4),
    )
        .prop_filter_map("positive definite", move |(a, b, (cn, cd))| {
            let mut m = vec![vec![Rational::from_integer(0); rank]; rank];
            let mut it = a.into_iter();
            for i in 0..rank {
                for j in i..rank {
                    let (n, d) = it.next().unwrap();
                    m[i][j] = r(n, d);
                    m[j][i] = r(n, d);
                }
            }
            NahmTriple::new(m, b.into_iter().map(|(n, d)| r(n, d)).collect(), r(cn, cd)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn unit_denominators_reproduce_nahm_sum(t in arb_triple(2)) {
        let as_multi = multi_sum(&t.to_multi_sum(), int(30)).unwrap();
        prop_assert_eq!(as_multi, nahm_sum(&t, int(30)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncation_stability(t in (1usize..=3).prop_flat_map(arb_triple), cut in 1i64..=12) {
        let hi = nahm_sum(&t, int(24)).unwrap();
        let lo = nahm_sum(&t, int(24 - cut)).unwrap();
        prop_assert_eq!(hi.truncate(int(24 - cut)), lo);
    }

    #[test]
    fn lebesgue_boundary_orders(o in 10i64..=120, zexp in -3i64..=0) {
        // negative powers inside the numerator reach below the term shift
        let ident = catalog::lebesgue(&Monomial::q(int(zexp)));
        prop_assert!(verify(&ident, int(o)).outcome.is_equal());
    }
}

#[test]
fn durfee_rectangles() {
    for n in -5..=5 {
        let rep = verify(&catalog::durfee(n), int(40));
        assert!(rep.outcome.is_equal(), "n={n}: {}", rep.outcome);
    }
}

#[test]
fn rank_two_family_grid() {
    for &((an, ad), (nn, nd)) in catalog::EXAMPLE1_SAMPLES {
        for ident in catalog::theorem_grid(r(an, ad), r(nn, nd)).unwrap() {
            let rep = verify(&ident, int(30));
            assert!(rep.outcome.is_equal(), "{}: {}", ident.id, rep.outcome);
        }
    }
    assert_eq!(catalog::EXAMPLE1_SAMPLES.len(), 12);
}

#[test]
fn warnaar_three_gives_example_two() {
    let w = catalog::warnaar(3).unwrap();
    assert!(verify(&w, int(30)).outcome.is_equal());
    // the k = 3 multi-sum in q^2 against (q,q^4,q^7;q^8)^{-1}
    let lhs = w.lhs.subst(int(2)).eval(int(40)).unwrap();
    let rhs = catalog::parse_expr("poch((q;q^8)_inf^-1, (q^4;q^8)_inf^-1, (q^7;q^8)_inf^-1)")
        .unwrap()
        .eval(int(40))
        .unwrap();
    assert!(lhs.eq_upto(&rhs, int(40)).unwrap().is_equal());
}

#[test]
fn documented_sum_sides() {
    let cat = catalog::builtin();
    let s36 = cat.get("S.36").unwrap().lhs.eval(int(5)).unwrap();
    assert_eq!(s36, PSeries::from_ints(&[1, 1, 1, 1, 2], int(5)));
    // n = 1 starts at q^3, and (q^2,q^3,q^5;q^5)/(q^2;q^2) = 1 + 0q + 0q^2 + ...
    let s19 = cat.get("S.19").unwrap();
    assert_eq!(s19.lhs.eval(int(3)).unwrap(), PSeries::from_ints(&[1, 0, 0], int(3)));
    assert_eq!(s19.rhs.eval(int(3)).unwrap(), PSeries::from_ints(&[1, 0, 0], int(3)));
    let t = NahmTriple::new(vec![vec![int(2), int(1)], vec![int(1), int(1)]], vec![int(1), r(1, 2)], int(0)).unwrap();
    assert_eq!(nahm_sum(&t, int(4)).unwrap(), PSeries::from_ints(&[1, 1, 2, 3], int(4)));
    let c = NahmTriple::new(vec![vec![int(3)]], vec![int(0)], r(7, 3)).unwrap();
    assert!(nahm_sum(&c, r(7, 3)).unwrap().is_zero());
}

#[test]
fn empty_multi_sum_is_a_monomial() {
    let s = MultiSum { q: vec![], l: vec![], c: r(-1, 3), d: vec![] };
    assert_eq!(multi_sum(&s, int(2)).unwrap(), PSeries::from_monomial(&Monomial::q(r(-1, 3)), int(2)));
}
