//! Trap canvases, trappified schemes, and embedding computations next to traps.
//!
//! A canvas prepares its trap vertices `V_T` in a product state `σ`, measures
//! every trap vertex at angle 0 (X basis) with no corrections, and rejects iff
//! some parity check over the trap outcomes is odd. Vertices outside `V_T`
//! are free: `|+⟩` with an arbitrary angle.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::angle::Angle;
use crate::graph::{GraphError, OpenGraph};
use crate::mbqc::{Dependencies, Flow, MbqcError, MeasurementPattern};
use crate::pauli::{Pauli, PauliWord};
use crate::rational::Rational;
use crate::state::{LocalState, ProductState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("trap set is empty")]
    EmptySet,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("vertices {0} and {1} are adjacent, so the set is not independent")]
    NotIndependent(usize, usize),
    #[error("Pauli word with phase i^{0} has no +1 eigenstate")]
    InvalidSign(u8),
    #[error("computation does not fit the free region: {0}")]
    DoesNotFit(&'static str),
    #[error("embedding creates a dependency between trap and computation at vertex {0}")]
    Improper(usize),
    #[error("invalid weights: {0}")]
    BadWeights(&'static str),
    #[error("schemes are over different graphs")]
    GraphMismatch,
    #[error("malformed canvas: {0}")]
    BadCanvas(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
}

/// A pattern on a subset of the host graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialPattern {
    pub vertices: BTreeSet<usize>,
    pub inputs: BTreeSet<usize>,
    pub outputs: BTreeSet<usize>,
    /// Angles on `vertices \ outputs`.
    pub angles: BTreeMap<usize, Angle>,
    pub flow: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanvasKind {
    /// Independent set `H`: `|+⟩` on `H`, `|0⟩` on `N(H)`, reject iff any `t_i = 1`, `i ∈ H`.
    Standard { h: BTreeSet<usize> },
    /// Any non-empty `H`: eigenstate of `∏_{i∈H} X_i Z_{N(i)}`, reject iff `⊕_{i∈H} t_i = 1`.
    General { h: BTreeSet<usize> },
    /// Anything else; analysed by simulation.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrappifiedCanvas {
    pub kind: CanvasKind,
    /// Trap partial pattern: `I_T = O_T = V_T`, no angles, no flow.
    pub trap: PartialPattern,
    /// Preparation of `I_T`.
    pub sigma: ProductState,
    /// Reject iff some check has odd outcome parity.
    pub checks: Vec<BTreeSet<usize>>,
}

impl TrappifiedCanvas {
    /// A canvas with no trap; always accepts.
    pub fn empty() -> TrappifiedCanvas {
        TrappifiedCanvas { kind: CanvasKind::Custom, trap: PartialPattern::default(), sigma: ProductState::new(), checks: Vec::new() }
    }

    /// Product-state trap on `sigma`'s vertices with the given parity checks.
    pub fn custom(g: &OpenGraph, sigma: ProductState, checks: Vec<BTreeSet<usize>>) -> Result<TrappifiedCanvas, TrapError> {
        let vt: BTreeSet<usize> = sigma.keys().copied().collect();
        if let Some(&v) = vt.iter().find(|v| !g.contains(**v)) {
            return Err(TrapError::UnknownVertex(v));
        }
        if checks.iter().flatten().any(|v| !vt.contains(v)) {
            return Err(TrapError::BadCanvas("checks must lie inside the trap vertices"));
        }
        Ok(TrappifiedCanvas { kind: CanvasKind::Custom, trap: trap_pattern(vt), sigma, checks })
    }

    pub fn trap_vertices(&self) -> &BTreeSet<usize> {
        &self.trap.vertices
    }

    /// Decision on trap outcomes `t` (missing vertices read as 0).
    pub fn rejects(&self, t: &BTreeMap<usize, u8>) -> bool {
        self.checks.iter().any(|c| c.iter().fold(0u8, |acc, v| acc ^ t.get(v).copied().unwrap_or(0)) == 1)
    }

    pub fn h(&self) -> Option<&BTreeSet<usize>> {
        match &self.kind {
            CanvasKind::Standard { h } | CanvasKind::General { h } => Some(h),
            CanvasKind::Custom => None,
        }
    }
}

fn trap_pattern(vt: BTreeSet<usize>) -> PartialPattern {
    PartialPattern { inputs: vt.clone(), outputs: vt.clone(), vertices: vt, angles: BTreeMap::new(), flow: BTreeMap::new() }
}

fn check_set(g: &OpenGraph, h: &BTreeSet<usize>) -> Result<(), TrapError> {
    if h.is_empty() {
        return Err(TrapError::EmptySet);
    }
    match h.iter().find(|v| !g.contains(**v)) {
        Some(&v) => Err(TrapError::UnknownVertex(v)),
        None => Ok(()),
    }
}

pub fn build_standard_trap(g: &OpenGraph, h: &BTreeSet<usize>) -> Result<TrappifiedCanvas, TrapError> {
    check_set(g, h)?;
    for &u in h {
        if let Some(w) = g.neighbours(u).find(|w| h.contains(w)) {
            return Err(TrapError::NotIndependent(u.min(w), u.max(w)));
        }
    }
    let nh = g.neighbourhood(h);
    let mut sigma = ProductState::new();
    for &v in h {
        sigma.insert(v, LocalState::PLUS);
    }
    for &v in &nh {
        sigma.insert(v, LocalState::Zero);
    }
    let vt: BTreeSet<usize> = sigma.keys().copied().collect();
    Ok(TrappifiedCanvas {
        kind: CanvasKind::Standard { h: h.clone() },
        trap: trap_pattern(vt),
        sigma,
        checks: h.iter().map(|&v| [v].into_iter().collect()).collect(),
    })
}

/// `∏_{i∈H} X_i ∏_{j∈N(i)} Z_j` over dense vertex indices.
pub fn general_trap_stabiliser(g: &OpenGraph, h: &BTreeSet<usize>) -> Result<PauliWord, TrapError> {
    check_set(g, h)?;
    let n = g.len();
    let mut acc = PauliWord::identity(n);
    for &i in h {
        let mut s = PauliWord::identity(n);
        s.ops[g.index_of(i).expect("checked")] = Pauli::X;
        for j in g.neighbours(i) {
            s.ops[g.index_of(j).expect("neighbour exists")] = Pauli::Z;
        }
        acc = acc.mul(&s);
    }
    Ok(acc)
}

/// Tensor-product +1 eigenstate of a Hermitian Pauli word: per-site
/// eigenstates, with a `−` sign absorbed at the first non-identity site.
/// Identity sites get `|+⟩`. `sites[k]` names site `k`.
pub fn prepare_stabiliser_product(word: &PauliWord, sites: &[usize]) -> Result<ProductState, TrapError> {
    assert_eq!(word.len(), sites.len(), "one vertex per site");
    let sign = word.sign().ok_or(TrapError::InvalidSign(word.phase))?;
    let first = word.ops.iter().position(|&p| p != Pauli::I);
    if first.is_none() && sign < 0 {
        return Err(TrapError::InvalidSign(word.phase));
    }
    Ok(word
        .ops
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let ls = match p {
                Pauli::I => LocalState::PLUS,
                _ => LocalState::eigenstate(p, !(Some(k) == first && sign < 0)).expect("non-identity"),
            };
            (sites[k], ls)
        })
        .collect())
}

/// At every site each pair of words agrees or one of them is the identity.
pub fn check_overlap_condition(words: &[PauliWord]) -> bool {
    let n = words.first().map_or(0, PauliWord::len);
    (0..n).all(|k| {
        let mut seen = Pauli::I;
        words.iter().all(|w| {
            let p = w.ops[k];
            if p == Pauli::I || seen == Pauli::I || seen == p {
                if p != Pauli::I {
                    seen = p;
                }
                true
            } else {
                false
            }
        })
    })
}

pub fn build_general_trap(g: &OpenGraph, h: &BTreeSet<usize>) -> Result<TrappifiedCanvas, TrapError> {
    let word = general_trap_stabiliser(g, h)?;
    let sigma = prepare_stabiliser_product(&word, g.vertices())?;
    Ok(TrappifiedCanvas {
        kind: CanvasKind::General { h: h.clone() },
        trap: trap_pattern(g.vertices().iter().copied().collect()),
        sigma,
        checks: alloc::vec![h.clone()],
    })
}

/// Contiguous run of canvases contributed by one composed scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub weight: Rational,
    pub canvases: Range<usize>,
}

/// A distribution over canvases on one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct TrappifiedScheme {
    pub graph: OpenGraph,
    pub canvases: Vec<TrappifiedCanvas>,
    pub weights: Vec<Rational>,
    /// Shared partial order on the graph (pairs `i ≺ j`).
    pub order: Vec<(usize, usize)>,
    pub components: Vec<Component>,
}

impl TrappifiedScheme {
    pub fn new(graph: OpenGraph, canvases: Vec<TrappifiedCanvas>, weights: Vec<Rational>) -> Result<TrappifiedScheme, TrapError> {
        if canvases.is_empty() {
            return Err(TrapError::BadWeights("scheme has no canvases"));
        }
        if canvases.len() != weights.len() {
            return Err(TrapError::BadWeights("one weight per canvas"));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(TrapError::BadWeights("weights must be positive"));
        }
        if weights.iter().fold(Rational::zero(), |a, b| a + b) != Rational::one() {
            return Err(TrapError::BadWeights("weights must sum to 1"));
        }
        for c in &canvases {
            if let Some(&v) = c.trap.vertices.iter().find(|v| !graph.contains(**v)) {
                return Err(TrapError::UnknownVertex(v));
            }
        }
        let n = canvases.len();
        Ok(TrappifiedScheme { graph, canvases, weights, order: Vec::new(), components: alloc::vec![Component { weight: Rational::one(), canvases: 0..n }] })
    }

    pub fn uniform(graph: OpenGraph, canvases: Vec<TrappifiedCanvas>) -> Result<TrappifiedScheme, TrapError> {
        let n = canvases.len().max(1) as i64;
        let weights = (0..canvases.len()).map(|_| crate::rational::ratio(1, n)).collect();
        TrappifiedScheme::new(graph, canvases, weights)
    }

    /// Standard traps on the given sets, uniformly.
    pub fn standard_uniform(graph: &OpenGraph, sets: &[BTreeSet<usize>]) -> Result<TrappifiedScheme, TrapError> {
        let canvases = sets.iter().map(|h| build_standard_trap(graph, h)).collect::<Result<_, _>>()?;
        TrappifiedScheme::uniform(graph.clone(), canvases)
    }

    /// Sample a canvas index exactly from the rational weights.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        sample_weighted(&self.weights, rng)
    }
}

/// Draws an index with probability proportional to exact rational weights.
pub fn sample_weighted<R: RngCore + ?Sized>(weights: &[Rational], rng: &mut R) -> usize {
    let lcm = weights.iter().fold(BigInt::one(), |l, w| l.lcm(w.denom()));
    let nums: Vec<BigInt> = weights.iter().map(|w| w.numer() * (&lcm / w.denom())).collect();
    let total: BigInt = nums.iter().sum();
    if let (Some(total), Some(nums)) = (total.to_u64(), nums.iter().map(|n| n.to_u64()).collect::<Option<Vec<u64>>>()) {
        let mut x = rng.gen_range(0..total);
        for (i, n) in nums.iter().enumerate() {
            if x < *n {
                return i;
            }
            x -= n;
        }
        return nums.len() - 1;
    }
    let mut x: f64 = rng.gen();
    for (i, w) in weights.iter().enumerate() {
        let p = w.to_f64().unwrap_or(0.0);
        if x < p {
            return i;
        }
        x -= p;
    }
    weights.len() - 1
}

/// Mixture `Σ p_i P_i` of schemes over the same graph.
pub fn compose_schemes(parts: &[(Rational, TrappifiedScheme)]) -> Result<TrappifiedScheme, TrapError> {
    let Some((_, first)) = parts.first() else { return Err(TrapError::BadWeights("nothing to compose")) };
    if parts.iter().any(|(_, s)| s.graph != first.graph) {
        return Err(TrapError::GraphMismatch);
    }
    if parts.iter().fold(Rational::zero(), |a, (p, _)| a + p) != Rational::one() || parts.iter().any(|(p, _)| !p.is_positive()) {
        return Err(TrapError::BadWeights("mixture weights must be positive and sum to 1"));
    }
    let mut canvases = Vec::new();
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for (p, s) in parts {
        let start = canvases.len();
        canvases.extend(s.canvases.iter().cloned());
        weights.extend(s.weights.iter().map(|w| w * p));
        components.push(Component { weight: p.clone(), canvases: start..canvases.len() });
    }
    let mut order = first.order.clone();
    for (_, s) in &parts[1..] {
        order.extend(s.order.iter().copied());
    }
    order.sort_unstable();
    order.dedup();
    Ok(TrappifiedScheme { graph: first.graph.clone(), canvases, weights, order, components })
}

/// A canvas (possibly with a computation) ready to execute on the host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrappifiedPattern {
    /// Host graph with inputs = every prepared vertex; partial flow.
    pub pattern: MeasurementPattern,
    /// Fixed preparations (trap `σ`, isolating dummies, computation inputs).
    pub preparation: ProductState,
    pub trap: BTreeSet<usize>,
    pub checks: Vec<BTreeSet<usize>>,
    /// Free vertices: `|+⟩` measured at an arbitrary angle.
    pub free: BTreeSet<usize>,
    /// Host vertices carrying the computation.
    pub computation: BTreeSet<usize>,
    /// Host vertices whose decrypted outcomes form the classical result.
    pub classical_outputs: Vec<usize>,
}

impl TrappifiedPattern {
    pub fn rejects(&self, t: &BTreeMap<usize, u8>) -> bool {
        self.checks.iter().any(|c| c.iter().fold(0u8, |acc, v| acc ^ t.get(v).copied().unwrap_or(0)) == 1)
    }

    /// Gives every free vertex an independent uniform angle.
    pub fn randomise_free<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        for &v in &self.free {
            if !self.pattern.graph.outputs().contains(&v) {
                self.pattern.angles.insert(v, Angle::new(rng.gen_range(0..8)));
            }
        }
    }

    /// No trap vertex depends on, or is depended on by, any other vertex.
    pub fn is_proper(&self) -> Result<(), TrapError> {
        let deps = Dependencies::of(&self.pattern);
        for (&v, xs) in &deps.x {
            let zs = &deps.z[&v];
            let touches_trap = xs.iter().chain(zs).any(|u| self.trap.contains(u));
            if touches_trap || (self.trap.contains(&v) && !(xs.is_empty() && zs.is_empty())) {
                return Err(TrapError::Improper(v));
            }
        }
        Ok(())
    }
}

/// Executes a lone canvas on `g`: trap vertices at angle 0, others free.
pub fn instantiate_canvas(g: &OpenGraph, canvas: &TrappifiedCanvas) -> Result<TrappifiedPattern, TrapError> {
    let free: BTreeSet<usize> = g.vertices().iter().copied().filter(|v| !canvas.trap.vertices.contains(v)).collect();
    let host = OpenGraph::new(g.vertices().iter().copied(), g.edges(), canvas.sigma.keys().copied(), g.outputs().iter().copied())?;
    let angles = g.vertices().iter().copied().filter(|v| !g.outputs().contains(v)).map(|v| (v, Angle::ZERO)).collect();
    let pattern = MeasurementPattern::new(host, angles, Flow::default());
    Ok(TrappifiedPattern {
        pattern,
        preparation: canvas.sigma.clone(),
        trap: canvas.trap.vertices.clone(),
        checks: canvas.checks.clone(),
        free,
        computation: BTreeSet::new(),
        classical_outputs: Vec::new(),
    })
}

/// Grid host for dummy-isolated embeddings: vertex `r·cols + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    /// Rows wrap around horizontally.
    pub cylindrical: bool,
}

impl GridLayout {
    pub fn graph(&self) -> OpenGraph {
        if self.cylindrical {
            OpenGraph::cylinder(self.rows, self.cols)
        } else {
            OpenGraph::grid(self.rows, self.cols)
        }
    }

    pub fn id(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    fn trap_cols(&self, col: usize) -> Result<[usize; 3], TrapError> {
        if self.rows < 3 || self.cols < 3 {
            return Err(TrapError::DoesNotFit("grid smaller than 3×3"));
        }
        if self.cylindrical {
            Ok([col % self.cols, (col + 1) % self.cols, (col + 2) % self.cols])
        } else if col + 2 < self.cols {
            Ok([col, col + 1, col + 2])
        } else {
            Err(TrapError::DoesNotFit("trap block leaves the grid"))
        }
    }

    /// 3×3 block in rows 0–2 starting at column `col`: centre `|+⟩`, the other
    /// eight `|0⟩`, reject iff the centre reads 1.
    pub fn block_trap(&self, col: usize) -> Result<TrappifiedCanvas, TrapError> {
        let cols = self.trap_cols(col)?;
        let centre = self.id(1, cols[1]);
        let mut sigma = ProductState::new();
        for r in 0..3 {
            for &c in &cols {
                let v = self.id(r, c);
                sigma.insert(v, if v == centre { LocalState::PLUS } else { LocalState::Zero });
            }
        }
        TrappifiedCanvas::custom(&self.graph(), sigma, alloc::vec![[centre].into_iter().collect()])
    }
}

/// A computation laid out on a `rows × cols` grid (vertex `r·cols + c`),
/// with fixed preparations on its inputs and classical outputs read from
/// measured vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridComputation {
    pub rows: usize,
    pub cols: usize,
    pub pattern: MeasurementPattern,
    pub input: ProductState,
    pub classical_outputs: Vec<usize>,
}

impl GridComputation {
    pub fn is_empty(&self) -> bool {
        self.pattern.graph.is_empty()
    }

    /// A one-row line computation `0 - 1 - … - (m−1)` with input `|+⟩`
    /// on vertex 0; every vertex is measured and the last outcome is the result.
    pub fn line(angles: &[Angle]) -> GridComputation {
        let m = angles.len();
        let graph = OpenGraph::new(0..m, (1..m).map(|i| (i - 1, i)), [0], []).expect("line is valid");
        let succ = (0..m.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        let flow = Flow::induced(&graph, succ);
        let pattern = MeasurementPattern::new(graph, angles.iter().copied().enumerate().collect(), flow);
        GridComputation { rows: 1, cols: m, pattern, input: [(0, LocalState::PLUS)].into_iter().collect(), classical_outputs: alloc::vec![m - 1] }
    }
}

/// Places `computation` in rows `3..` of the grid, the 3×3 block trap at
/// column `trap_col` in rows 0–2 (none for `None`), `|0⟩` dummies on the rest
/// of row 2 and on unused computation cells, and free vertices on the rest of
/// rows 0–1.
pub fn embed_dummy_isolated(layout: &GridLayout, trap_col: Option<usize>, computation: &GridComputation) -> Result<TrappifiedPattern, TrapError> {
    let canvas = match trap_col {
        Some(col) => layout.block_trap(col)?,
        None if layout.rows < 3 => return Err(TrapError::DoesNotFit("grid has no room below the trap rows")),
        None => TrappifiedCanvas::empty(),
    };
    let host = layout.graph();
    if computation.is_empty() {
        return instantiate_canvas(&host, &canvas);
    }
    if computation.rows + 3 > layout.rows || computation.cols > layout.cols {
        return Err(TrapError::DoesNotFit("computation larger than the free rows"));
    }
    let cg = &computation.pattern.graph;
    let map = |v: usize| -> Result<usize, TrapError> {
        let (r, c) = (v / computation.cols, v % computation.cols);
        if r >= computation.rows {
            return Err(TrapError::DoesNotFit("computation vertex outside its grid"));
        }
        Ok(layout.id(r + 3, c))
    };
    let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in cg.vertices() {
        comp.insert(v, map(v)?);
    }
    let image: BTreeSet<usize> = comp.values().copied().collect();
    let mut image_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, b) in cg.edges() {
        let (x, y) = (comp[&a], comp[&b]);
        if !host.adjacent(x, y) {
            return Err(TrapError::DoesNotFit("computation edge is not a grid edge"));
        }
        image_edges.insert((x.min(y), x.max(y)));
    }
    for (a, b) in host.edges() {
        if image.contains(&a) && image.contains(&b) && !image_edges.contains(&(a, b)) {
            return Err(TrapError::DoesNotFit("computation must be an induced subgraph of the grid"));
        }
    }

    let mut preparation = canvas.sigma.clone();
    let trap = canvas.trap.vertices.clone();
    let mut free = BTreeSet::new();
    for r in 0..layout.rows {
        for c in 0..layout.cols {
            let v = layout.id(r, c);
            if trap.contains(&v) || image.contains(&v) {
                continue;
            }
            if r < 2 {
                free.insert(v);
            } else {
                preparation.insert(v, LocalState::Zero);
            }
        }
    }
    for (&v, &ls) in &computation.input {
        preparation.insert(*comp.get(&v).ok_or(TrapError::UnknownVertex(v))?, ls);
    }
    let outputs: Vec<usize> = cg.outputs().iter().map(|v| comp[v]).collect();
    let graph = OpenGraph::new(host.vertices().iter().copied(), host.edges(), preparation.keys().copied(), outputs.iter().copied())?;
    let mut angles = BTreeMap::new();
    for &v in host.vertices() {
        if !graph.outputs().contains(&v) {
            angles.insert(v, Angle::ZERO);
        }
    }
    for (&v, &a) in &computation.pattern.angles {
        angles.insert(comp[&v], a);
    }
    let succ: BTreeMap<usize, usize> = computation.pattern.flow.successor.iter().map(|(a, b)| (comp[a], comp[b])).collect();
    let inert: BTreeSet<usize> = preparation.iter().filter(|(_, ls)| matches!(ls, LocalState::Zero | LocalState::One)).map(|(&v, _)| v).collect();
    let mut flow = Flow::induced_with_inert(&graph, succ, inert);
    flow.order.extend(computation.pattern.flow.order.iter().map(|(a, b)| (comp[a], comp[b])));
    flow.order.sort_unstable();
    flow.order.dedup();
    let tp = TrappifiedPattern {
        pattern: MeasurementPattern::new(graph, angles, flow),
        preparation,
        trap,
        checks: canvas.checks,
        free,
        computation: image,
        classical_outputs: computation.classical_outputs.iter().map(|v| comp[v]).collect(),
    };
    tp.is_proper()?;
    Ok(tp)
}
