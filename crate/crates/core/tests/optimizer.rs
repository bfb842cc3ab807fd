mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use trapkit_core::analysis::{scheme_epsilon, DeviationSet};
use trapkit_core::graph::fractional_chromatic_number;
use trapkit_core::optimizer::{build_relation, colouring_distribution, general_candidates, solve_distribution, standard_candidates, to_scheme};
use trapkit_core::rational::ratio;
use trapkit_core::{OpenGraph, Rational};

use common::arb_graph;

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The LP optimum over standard traps is `1/χ_f`, and the optimal mixture realises it.
    #[test]
    fn standard_optimum_is_inverse_fractional_chromatic_number(g in arb_graph(1, 8)) {
        let rel = build_relation(&g, standard_candidates(&g).unwrap(), &DeviationSet::AllXY).unwrap();
        let dist = solve_distribution(&rel).unwrap();
        let chi_f = fractional_chromatic_number(&g).unwrap().value;
        prop_assert_eq!(&dist.rate, &chi_f.recip());
        let (col, col_rate) = colouring_distribution(&g).unwrap();
        prop_assert_eq!(&col_rate, &dist.rate);
        prop_assert_eq!(Rational::one() - scheme_epsilon(&col, &DeviationSet::AllXY).unwrap().value, col_rate);
        if g.len() <= 7 {
            let s = to_scheme(&g, &rel, &dist).unwrap();
            prop_assert_eq!(Rational::one() - scheme_epsilon(&s, &DeviationSet::AllXY).unwrap().value, dist.rate.clone());
        }
    }

    /// The dual attack holds every test to the primal rate and is met with equality by the primal mixture.
    #[test]
    fn dual_attack_is_optimal(g in arb_graph(1, 7), general in any::<bool>()) {
        let tests = if general && g.len() <= 5 { general_candidates(&g).unwrap() } else { standard_candidates(&g).unwrap() };
        let rel = build_relation(&g, tests, &DeviationSet::AllXY).unwrap();
        let dist = solve_distribution(&rel).unwrap();
        let total: Rational = dist.attack.iter().cloned().sum();
        prop_assert_eq!(total, Rational::one());
        prop_assert!(dist.attack.iter().all(|a| !a.is_negative()));
        for row in &rel.detects {
            prop_assert!(dot(row, &dist.attack) <= dist.rate);
        }
        let mixed: Rational = rel.detects.iter().zip(&dist.weights).map(|(row, w)| w * dot(row, &dist.attack)).sum();
        prop_assert_eq!(mixed, dist.rate.clone());
        for e in 0..rel.errors.len() {
            prop_assert!(dot(&rel.column(e), &dist.weights) >= dist.rate);
        }
    }

    /// Over every non-empty parity check the optimum is `2^{n−1}/(2^n − 1)` whatever the edges.
    #[test]
    fn general_optimum_depends_only_on_size(g in arb_graph(1, 5)) {
        let rel = build_relation(&g, general_candidates(&g).unwrap(), &DeviationSet::AllXY).unwrap();
        let dist = solve_distribution(&rel).unwrap();
        let n = g.len() as u32;
        prop_assert_eq!(dist.rate, ratio(1 << (n - 1), (1 << n) - 1));
    }
}

#[test]
fn named_optima() {
    let cases = [
        (OpenGraph::cycle(5), ratio(2, 5)),
        (OpenGraph::complete(3), ratio(1, 3)),
        (OpenGraph::petersen(), ratio(2, 5)),
        (OpenGraph::path(4), ratio(1, 2)),
        (OpenGraph::simple(4, []).unwrap(), Rational::one()),
    ];
    for (g, rate) in cases {
        let rel = build_relation(&g, standard_candidates(&g).unwrap(), &DeviationSet::AllXY).unwrap();
        assert_eq!(solve_distribution(&rel).unwrap().rate, rate, "{g:?}");
    }
}

#[test]
fn zero_rate_when_a_deviation_escapes_every_test() {
    let g = OpenGraph::path(3);
    let only_ends = vec![trapkit_core::traps::build_standard_trap(&g, &common::set(&[0, 2])).unwrap()];
    let rel = build_relation(&g, only_ends, &DeviationSet::AllXY).unwrap();
    let dist = solve_distribution(&rel).unwrap();
    assert!(dist.rate.is_zero());
    assert_eq!(rel.errors[dist.undetected.unwrap()].iter().map(|(v, _)| v).collect::<Vec<_>>(), vec![1]);
}
