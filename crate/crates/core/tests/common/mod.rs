#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use trapkit_core::mbqc::{Flow, MeasurementPattern};
use trapkit_core::state::LocalState;
use trapkit_core::{Angle, OpenGraph, Pauli, PauliDeviation};

/// Simple graph on `0..n` from an edge mask over the `n(n−1)/2` pairs.
pub fn graph_from_mask(n: usize, mask: u64) -> OpenGraph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    OpenGraph::simple(n, edges).unwrap()
}

pub fn arb_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = OpenGraph> {
    (min_n..=max_n, any::<u64>()).prop_map(|(n, mask)| graph_from_mask(n, mask))
}

pub fn arb_pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

/// A deviation over vertices `0..n`.
pub fn arb_deviation(n: usize) -> impl Strategy<Value = PauliDeviation> {
    proptest::collection::vec(arb_pauli(), n).prop_map(|ps| ps.into_iter().enumerate().collect())
}

pub fn arb_local_state() -> impl Strategy<Value = LocalState> {
    prop_oneof![Just(LocalState::Zero), Just(LocalState::One), (0i64..8).prop_map(|k| LocalState::PlusTheta(Angle::new(k)))]
}

/// Cluster state on a `rows × cols` grid with row-wise flow, inputs in the
/// first column and outputs in the last. Vertex `r·cols + c`.
pub fn grid_pattern(rows: usize, cols: usize, angles: &[i64]) -> MeasurementPattern {
    let id = |r: usize, c: usize| r * cols + c;
    let inputs: Vec<usize> = (0..rows).map(|r| id(r, 0)).collect();
    let outputs: Vec<usize> = (0..rows).map(|r| id(r, cols - 1)).collect();
    let g = OpenGraph::grid(rows, cols).with_io(inputs, outputs).unwrap();
    let mut succ = BTreeMap::new();
    let mut phi = BTreeMap::new();
    let mut k = angles.iter().cycle();
    for r in 0..rows {
        for c in 0..cols - 1 {
            succ.insert(id(r, c), id(r, c + 1));
            phi.insert(id(r, c), Angle::new(*k.next().unwrap_or(&0)));
        }
    }
    let flow = Flow::induced(&g, succ);
    MeasurementPattern::new(g, phi, flow)
}

/// Grid shapes with at most `max_measured` measured qubits.
pub fn arb_grid_pattern(max_measured: usize, clifford: bool) -> impl Strategy<Value = MeasurementPattern> {
    let shapes: Vec<(usize, usize)> =
        (1..=3).flat_map(|r| (2..=7).map(move |c| (r, c))).filter(|&(r, c)| r * (c - 1) <= max_measured).collect();
    (proptest::sample::select(shapes), proptest::collection::vec(0i64..8, 12)).prop_map(move |((r, c), angles)| {
        let angles: Vec<i64> = angles.into_iter().map(|k| if clifford { k & !1 } else { k }).collect();
        grid_pattern(r, c, &angles)
    })
}

pub fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

/// All subsets of `g`'s vertices, including the empty set.
pub fn all_subsets(g: &OpenGraph) -> Vec<BTreeSet<usize>> {
    (0u64..1 << g.len()).map(|m| g.mask_to_set(m)).collect()
}
