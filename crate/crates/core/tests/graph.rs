mod common;

use num_traits::One;
use proptest::prelude::*;
use trapkit_core::graph::{
    catalogue::graphs_up_to_isomorphism, chromatic_number, clique_number, fractional_chromatic_number, independent_sets, optimal_colouring,
};
use trapkit_core::{OpenGraph, Rational};

use common::{arb_graph, graph_from_mask};

fn check_sandwich(g: &OpenGraph) {
    let omega = Rational::from_integer(clique_number(g).unwrap().into());
    let chi = Rational::from_integer(chromatic_number(g).unwrap().into());
    let fc = fractional_chromatic_number(g).unwrap();
    assert!(omega <= fc.value && fc.value <= chi, "{g:?}: ω={omega} χ_f={} χ={chi}", fc.value);

    // Primal: a fractional colouring of total weight χ_f covering every vertex.
    let total: Rational = fc.colouring.iter().map(|(_, w)| w.clone()).sum();
    assert_eq!(total, fc.value);
    for &v in g.vertices() {
        let cover: Rational = fc.colouring.iter().filter(|(s, _)| s.contains(&v)).map(|(_, w)| w.clone()).sum();
        assert!(cover >= Rational::one());
    }
    // Dual: a fractional clique of the same value, at most 1 on each independent set.
    let dual: Rational = fc.clique.values().cloned().sum();
    assert_eq!(dual, fc.value);
    for s in independent_sets(g, None).unwrap() {
        let load: Rational = s.iter().map(|v| fc.clique.get(v).cloned().unwrap_or_default()).sum();
        assert!(load <= Rational::one());
    }
}

#[test]
fn known_values() {
    let pentagon = OpenGraph::cycle(5);
    assert_eq!(fractional_chromatic_number(&pentagon).unwrap().value, trapkit_core::rational::ratio(5, 2));
    assert_eq!(chromatic_number(&OpenGraph::petersen()).unwrap(), 3);
    assert_eq!(fractional_chromatic_number(&OpenGraph::petersen()).unwrap().value, trapkit_core::rational::ratio(5, 2));
    assert_eq!(clique_number(&OpenGraph::complete(4)).unwrap(), 4);
}

#[test]
fn sandwich_on_every_graph_up_to_six_vertices() {
    for n in 1..=6 {
        for g in graphs_up_to_isomorphism(n, false) {
            check_sandwich(&g);
        }
    }
}

#[test]
fn isomorphism_catalogue_counts() {
    // Non-isomorphic graphs and connected graphs on n vertices.
    let all = [1, 2, 4, 11, 34, 156];
    let connected = [1, 1, 2, 6, 21, 112];
    for n in 1..=6 {
        assert_eq!(graphs_up_to_isomorphism(n, false).len(), all[n - 1], "n={n}");
        assert_eq!(graphs_up_to_isomorphism(n, true).len(), connected[n - 1], "n={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich_on_random_graphs(g in arb_graph(1, 8)) {
        check_sandwich(&g);
    }

    #[test]
    fn independent_sets_are_independent(g in arb_graph(1, 9)) {
        let sets = independent_sets(&g, None).unwrap();
        for s in &sets {
            for &u in s {
                for &v in s {
                    prop_assert!(!g.adjacent(u, v));
                }
            }
        }
        // Every vertex subset that is independent is listed.
        let count = (0u64..1 << g.len()).filter(|&m| g.is_independent(&g.mask_to_set(m))).count();
        prop_assert_eq!(sets.len() + 1, count);
    }

    #[test]
    fn optimal_colouring_is_proper(n in 1usize..8, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        let classes = optimal_colouring(&g).unwrap();
        prop_assert_eq!(classes.len(), chromatic_number(&g).unwrap());
        let covered: usize = classes.iter().map(|c| c.len()).sum();
        prop_assert_eq!(covered, n);
        for c in &classes {
            prop_assert!(g.is_independent(c));
        }
    }
}
