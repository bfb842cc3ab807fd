//! Small graphs up to isomorphism.
//!
//! Canonical forms come from colour refinement followed by a search over the
//! orderings that respect the refined (isomorphism-invariant) colour classes;
//! the canonical code is the lexicographically least upper-triangle bitstring.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::OpenGraph;

/// Largest vertex count accepted by [`canonical_code`].
pub const MAX_CANONICAL_VERTICES: usize = 11;

/// Isomorphism-invariant code of a graph on at most 11 vertices.
pub fn canonical_code(g: &OpenGraph) -> u64 {
    let n = g.len();
    assert!(n <= MAX_CANONICAL_VERTICES, "canonical form limited to 11 vertices");
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            let mut row = vec![false; n];
            for &j in g.adjacency_indices(i) {
                row[j] = true;
            }
            row
        })
        .collect();
    let colour = refine(&adj);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let classes = colour.iter().copied().max().map_or(0, |m| m + 1);
    for c in 0..classes {
        cells.push((0..n).filter(|&v| colour[v] == c).collect());
    }
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(&adj, &cells, 0, &mut order, &mut used, &mut best);
    best
}

fn refine(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut colour = vec![0usize; n];
    let mut classes = usize::from(n > 0);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut ns: Vec<usize> = (0..n).filter(|&u| adj[v][u]).map(|u| colour[u]).collect();
                ns.sort_unstable();
                (colour[v], ns)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let ranked: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sigs.iter().map(|s| ranked.binary_search(&s).expect("signature present")).collect();
        let count = ranked.len();
        colour = next;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}

fn search(adj: &[Vec<bool>], cells: &[Vec<usize>], cell: usize, order: &mut Vec<usize>, used: &mut [bool], best: &mut u64) {
    let n = adj.len();
    let placed = order.len();
    // Prune on the partial code: the bits fixed so far are a prefix of the final code.
    let partial = encode(adj, order, n);
    let fixed_bits = placed * placed.saturating_sub(1) / 2;
    let total_bits = n * n.saturating_sub(1) / 2;
    if fixed_bits > 0 && (partial >> (total_bits - fixed_bits)) > (*best >> (total_bits - fixed_bits)) {
        return;
    }
    if placed == n {
        *best = (*best).min(partial);
        return;
    }
    let cell_members = &cells[cell];
    let placed_in_cell = order.iter().filter(|v| cell_members.contains(v)).count();
    let next_cell = if placed_in_cell + 1 == cell_members.len() { cell + 1 } else { cell };
    for &v in cell_members {
        if !used[v] {
            used[v] = true;
            order.push(v);
            search(adj, cells, next_cell, order, used, best);
            order.pop();
            used[v] = false;
        }
    }
}

/// Upper-triangle bits in column-major order (pairs (i, j), i < j, ordered by
/// j then i), so every placed prefix fixes a prefix of the code.
fn encode(adj: &[Vec<bool>], order: &[usize], n: usize) -> u64 {
    let total_bits = n * n.saturating_sub(1) / 2;
    let mut code = 0u64;
    let mut bit = 0;
    for j in 1..order.len() {
        for i in 0..j {
            if adj[order[i]][order[j]] {
                code |= 1 << (total_bits - 1 - bit);
            }
            bit += 1;
        }
    }
    code
}

fn from_code(n: usize, code: u64) -> OpenGraph {
    let total_bits = n * n.saturating_sub(1) / 2;
    let mut edges = Vec::new();
    let mut bit = 0;
    for j in 1..n {
        for i in 0..j {
            if code >> (total_bits - 1 - bit) & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    OpenGraph::simple(n, edges).expect("decoded edges are valid")
}

/// One representative of every isomorphism class of graphs on exactly `n`
/// vertices, in canonical-code order.
pub fn graphs_up_to_isomorphism(n: usize, connected_only: bool) -> Vec<OpenGraph> {
    assert!(n <= 8, "catalogue limited to 8 vertices");
    let mut level: BTreeSet<u64> = BTreeSet::new();
    level.insert(0);
    for k in 1..n {
        let mut next = BTreeSet::new();
        for &code in &level {
            let base = from_code(k, code);
            let edges = base.edges();
            for nbrs in 0u64..(1 << k) {
                let mut e = edges.clone();
                e.extend((0..k).filter(|&i| nbrs >> i & 1 == 1).map(|i| (i, k)));
                let g = OpenGraph::simple(k + 1, e).expect("extension edges are valid");
                next.insert(canonical_code(&g));
            }
        }
        level = next;
    }
    if n == 0 {
        return Vec::new();
    }
    level.into_iter().map(|c| from_code(n, c)).filter(|g| !connected_only || g.is_connected()).collect()
}
