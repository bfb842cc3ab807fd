//! Open graphs and the colouring quantities that govern standard-trap design.
//!
//! Exhaustive routines work on `u64` bitmasks over dense vertex indices and
//! refuse graphs above [`MAX_ENUMERATION_VERTICES`].

pub mod catalogue;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lp::{self, LpError};
use crate::rational::Rational;

/// Largest vertex count accepted by independent-set enumeration.
pub const MAX_ENUMERATION_VERTICES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} listed twice")]
    DuplicateVertex(usize),
    #[error("graph has {actual} vertices, enumeration cap is {limit}")]
    CapExceeded { limit: usize, actual: usize },
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

/// Simple undirected graph with distinguished input and output vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenGraph {
    vertices: Vec<usize>,
    index: BTreeMap<usize, usize>,
    adj: Vec<Vec<usize>>,
    inputs: BTreeSet<usize>,
    outputs: BTreeSet<usize>,
}

impl OpenGraph {
    /// Duplicate edges are merged; self-loops and unknown endpoints are errors.
    pub fn new(
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        inputs: impl IntoIterator<Item = usize>,
        outputs: impl IntoIterator<Item = usize>,
    ) -> Result<OpenGraph, GraphError> {
        let mut vs: Vec<usize> = vertices.into_iter().collect();
        let unique: BTreeSet<usize> = vs.iter().copied().collect();
        if unique.len() != vs.len() {
            vs.sort_unstable();
            let dup = vs.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]).unwrap_or_default();
            return Err(GraphError::DuplicateVertex(dup));
        }
        let vertices: Vec<usize> = unique.into_iter().collect();
        let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vertices.len()];
        for (u, v) in edges {
            let iu = *index.get(&u).ok_or(GraphError::UnknownVertex(u))?;
            let iv = *index.get(&v).ok_or(GraphError::UnknownVertex(v))?;
            if iu == iv {
                return Err(GraphError::SelfLoop(u));
            }
            adj_sets[iu].insert(iv);
            adj_sets[iv].insert(iu);
        }
        let check = |set: BTreeSet<usize>| -> Result<BTreeSet<usize>, GraphError> {
            match set.iter().find(|v| !index.contains_key(v)) {
                Some(&v) => Err(GraphError::UnknownVertex(v)),
                None => Ok(set),
            }
        };
        let inputs = check(inputs.into_iter().collect())?;
        let outputs = check(outputs.into_iter().collect())?;
        let adj = adj_sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(OpenGraph { vertices, index, adj, inputs, outputs })
    }

    /// Graph on `0..n` with no inputs or outputs.
    pub fn simple(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<OpenGraph, GraphError> {
        OpenGraph::new(0..n, edges, [], [])
    }

    pub fn cycle(n: usize) -> OpenGraph {
        let edges: Vec<_> = if n >= 3 { (0..n).map(|i| (i, (i + 1) % n)).collect() } else { (1..n).map(|i| (i - 1, i)).collect() };
        OpenGraph::simple(n, edges).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> OpenGraph {
        OpenGraph::simple(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> OpenGraph {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        OpenGraph::simple(n, edges).expect("complete edges are valid")
    }

    /// `rows × cols` grid with vertex `r·cols + c`.
    pub fn grid(rows: usize, cols: usize) -> OpenGraph {
        OpenGraph::simple(rows * cols, grid_edges(rows, cols, false)).expect("grid edges are valid")
    }

    /// Grid whose rows wrap around (requires `cols ≥ 3`).
    pub fn cylinder(rows: usize, cols: usize) -> OpenGraph {
        OpenGraph::simple(rows * cols, grid_edges(rows, cols, cols >= 3)).expect("cylinder edges are valid")
    }

    pub fn petersen() -> OpenGraph {
        let mut e: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        e.extend((0..5).map(|i| (i, i + 5)));
        e.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        OpenGraph::simple(10, e).expect("Petersen edges are valid")
    }

    pub fn with_io(mut self, inputs: impl IntoIterator<Item = usize>, outputs: impl IntoIterator<Item = usize>) -> Result<OpenGraph, GraphError> {
        let inputs: BTreeSet<usize> = inputs.into_iter().collect();
        let outputs: BTreeSet<usize> = outputs.into_iter().collect();
        if let Some(&v) = inputs.iter().chain(&outputs).find(|v| !self.index.contains_key(v)) {
            return Err(GraphError::UnknownVertex(v));
        }
        self.inputs = inputs;
        self.outputs = outputs;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Sorted vertex identifiers; position is the dense index.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn inputs(&self) -> &BTreeSet<usize> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<usize> {
        &self.outputs
    }

    pub fn contains(&self, v: usize) -> bool {
        self.index.contains_key(&v)
    }

    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.vertices[i]
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let i = self.index.get(&v).copied();
        i.into_iter().flat_map(move |i| self.adj[i].iter().map(move |&j| self.vertices[j]))
    }

    pub fn neighbour_set(&self, v: usize) -> BTreeSet<usize> {
        self.neighbours(v).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.index.get(&v).map_or(0, |&i| self.adj[i].len())
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        match (self.index.get(&u), self.index.get(&v)) {
            (Some(&a), Some(&b)) => self.adj[a].binary_search(&b).is_ok(),
            _ => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, ns) in self.adj.iter().enumerate() {
            for &j in ns {
                if i < j {
                    out.push((self.vertices[i], self.vertices[j]));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Dense neighbour indices of dense index `i`.
    pub fn adjacency_indices(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    /// Neighbourhood bitmasks over dense indices.
    pub fn adjacency_masks(&self) -> Result<Vec<u64>, GraphError> {
        if self.len() > 64 {
            return Err(GraphError::CapExceeded { limit: 64, actual: self.len() });
        }
        Ok(self.adj.iter().map(|ns| ns.iter().fold(0u64, |m, &j| m | (1 << j))).collect())
    }

    pub fn is_independent(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&u| self.neighbours(u).all(|w| !set.contains(&w)))
    }

    /// `N(S)`: vertices outside `S` adjacent to some member of `S`.
    pub fn neighbourhood(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().flat_map(|&u| self.neighbours(u)).filter(|w| !set.contains(w)).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &self.adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn mask_to_set(&self, mask: u64) -> BTreeSet<usize> {
        (0..self.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.vertices[i]).collect()
    }

    pub fn set_to_mask(&self, set: &BTreeSet<usize>) -> Result<u64, GraphError> {
        let mut m = 0u64;
        for &v in set {
            let i = self.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
            if i >= 64 {
                return Err(GraphError::CapExceeded { limit: 64, actual: self.len() });
            }
            m |= 1 << i;
        }
        Ok(m)
    }
}

fn grid_edges(rows: usize, cols: usize, wrap: bool) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1));
            } else if wrap {
                e.push((v, r * cols));
            }
            if r + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    e
}

fn check_cap(g: &OpenGraph) -> Result<(), GraphError> {
    if g.len() > MAX_ENUMERATION_VERTICES {
        return Err(GraphError::CapExceeded { limit: MAX_ENUMERATION_VERTICES, actual: g.len() });
    }
    Ok(())
}

/// All non-empty independent sets (of size at most `max_size`) as dense-index
/// bitmasks, ordered by size and then lexicographically.
pub fn independent_set_masks(g: &OpenGraph, max_size: Option<usize>) -> Result<Vec<u64>, GraphError> {
    check_cap(g)?;
    let adj = g.adjacency_masks()?;
    let limit = max_size.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    fn rec(adj: &[u64], start: usize, current: u64, blocked: u64, size: usize, limit: usize, out: &mut Vec<u64>) {
        if size == limit {
            return;
        }
        for v in start..adj.len() {
            if blocked >> v & 1 == 0 {
                let next = current | 1 << v;
                out.push(next);
                rec(adj, v + 1, next, blocked | adj[v] | 1 << v, size + 1, limit, out);
            }
        }
    }
    rec(&adj, 0, 0, 0, 0, limit, &mut out);
    out.sort_by_cached_key(|&m| (m.count_ones(), (0..64).filter(|&i| m >> i & 1 == 1).collect::<Vec<u32>>()));
    Ok(out)
}

pub fn independent_sets(g: &OpenGraph, max_size: Option<usize>) -> Result<Vec<BTreeSet<usize>>, GraphError> {
    Ok(independent_set_masks(g, max_size)?.into_iter().map(|m| g.mask_to_set(m)).collect())
}

/// Inclusion-maximal independent sets as bitmasks.
pub fn maximal_independent_set_masks(g: &OpenGraph) -> Result<Vec<u64>, GraphError> {
    let adj = g.adjacency_masks()?;
    let n = g.len();
    Ok(independent_set_masks(g, None)?
        .into_iter()
        .filter(|&m| (0..n).all(|v| m >> v & 1 == 1 || adj[v] & m != 0))
        .collect())
}

/// Size of a largest clique (`ω`); 0 for the empty graph.
pub fn clique_number(g: &OpenGraph) -> Result<usize, GraphError> {
    let adj = g.adjacency_masks()?;
    let mut best = 0;
    fn expand(adj: &[u64], size: usize, mut cand: u64, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        while cand != 0 {
            if size + cand.count_ones() as usize <= *best {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= !(1 << v);
            expand(adj, size + 1, cand & adj[v], best);
        }
    }
    let all = if g.is_empty() { 0 } else { u64::MAX >> (64 - g.len()) };
    expand(&adj, 0, all, &mut best);
    Ok(best)
}

/// A proper colouring with the minimum number of colours, as colour classes.
pub fn optimal_colouring(g: &OpenGraph) -> Result<Vec<BTreeSet<usize>>, GraphError> {
    let adj = g.adjacency_masks()?;
    let n = g.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| core::cmp::Reverse(adj[v].count_ones()));
    let lower = clique_number(g)?.max(1);
    for k in lower..=n {
        let mut colour = vec![usize::MAX; n];
        if colour_rec(&adj, &order, 0, k, &mut colour, 0) {
            let mut classes = vec![BTreeSet::new(); k];
            for v in 0..n {
                classes[colour[v]].insert(g.vertex(v));
            }
            classes.retain(|c| !c.is_empty());
            return Ok(classes);
        }
    }
    unreachable!("n colours always suffice")
}

fn colour_rec(adj: &[u64], order: &[usize], pos: usize, k: usize, colour: &mut [usize], used: usize) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    // Colours beyond `used` are interchangeable, so only one fresh colour is tried.
    for c in 0..k.min(used + 1) {
        let clash = (0..adj.len()).any(|u| adj[v] >> u & 1 == 1 && colour[u] == c);
        if !clash {
            colour[v] = c;
            if colour_rec(adj, order, pos + 1, k, colour, used.max(c + 1)) {
                return true;
            }
            colour[v] = usize::MAX;
        }
    }
    false
}

/// Chromatic number `χ`.
pub fn chromatic_number(g: &OpenGraph) -> Result<usize, GraphError> {
    Ok(optimal_colouring(g)?.len())
}

/// Optimal fractional colouring and the matching fractional clique.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalChromatic {
    /// `χ_f`, equal to the fractional clique number by duality.
    pub value: Rational,
    /// Independent sets with positive weight; weights cover every vertex at least once.
    pub colouring: Vec<(BTreeSet<usize>, Rational)>,
    /// Vertex weights summing to `value` with at most 1 on every independent set.
    pub clique: BTreeMap<usize, Rational>,
}

/// Exact `χ_f` by the fractional clique packing program over maximal
/// independent sets; the covering solution is its dual.
pub fn fractional_chromatic_number(g: &OpenGraph) -> Result<FractionalChromatic, GraphError> {
    let n = g.len();
    if n == 0 {
        return Ok(FractionalChromatic { value: Rational::zero(), colouring: Vec::new(), clique: BTreeMap::new() });
    }
    let sets = maximal_independent_set_masks(g)?;
    let a: Vec<Vec<Rational>> = sets
        .iter()
        .map(|&m| (0..n).map(|v| if m >> v & 1 == 1 { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let b = vec![Rational::one(); sets.len()];
    let c = vec![Rational::one(); n];
    let sol = lp::maximize(&a, &b, &c)?;
    let colouring = sets
        .iter()
        .zip(sol.dual)
        .filter(|(_, x)| !x.is_zero())
        .map(|(&m, x)| (g.mask_to_set(m), x))
        .collect();
    let clique = sol.primal.into_iter().enumerate().map(|(i, y)| (g.vertex(i), y)).collect();
    Ok(FractionalChromatic { value: sol.value, colouring, clique })
}
