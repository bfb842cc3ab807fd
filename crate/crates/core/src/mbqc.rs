//! Measurement patterns with flow, and their execution.
//!
//! A measured vertex `i` is rotated by `Z(−φ'(i))`, Hadamard-ed and read in
//! the computational basis, where `φ'(i) = (−1)^{s_X(i)} φ(i) + s_Z(i)π`.
//! Deviations passed to the runners act in that final frame: X or Y flips the
//! raw outcome, Z is invisible. Outputs receive the deviation before the
//! byproduct correction `Z^{s_Z} X^{s_X}`.
//!
//! Flows may be partial. A measured vertex without a successor emits no
//! corrections; [`validate_flow`] reports it, [`flow_condition_violations`]
//! does not.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::angle::Angle;
use crate::graph::{GraphError, OpenGraph};
use crate::pauli::{Pauli, PauliDeviation};
use crate::rational::Rational;
use crate::state::{LocalState, ProductState, QuantumState, StateError, MAX_STATEVECTOR_QUBITS};
use crate::tableau::Tableau;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MbqcError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("vertex {0} is measured but has no angle")]
    MissingAngle(usize),
    #[error("input vertex {0} is missing from the supplied input state")]
    MissingInput(usize),
    #[error("qubit {0} of the input state is not a graph vertex")]
    InputNotInGraph(usize),
    #[error("no forced outcome for vertex {0}")]
    MissingForcedOutcome(usize),
    #[error("vertex {0} needs a non-Clifford angle or preparation")]
    NotClifford(usize),
    #[error("forced outcome {outcome} on vertex {vertex} is impossible")]
    ImpossibleOutcome { vertex: usize, outcome: u8 },
    #[error("measurement order is cyclic")]
    CyclicOrder,
    #[error("pattern has {actual} qubits, simulator cap is {limit}")]
    CapExceeded { limit: usize, actual: usize },
}

/// Successor map `f` together with an explicit strict partial order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flow {
    pub successor: BTreeMap<usize, usize>,
    /// Pairs `(i, j)` meaning `i ≺ j`.
    pub order: Vec<(usize, usize)>,
    /// Vertices prepared in a Z eigenstate. Z byproducts act trivially on
    /// them, so they take no Z corrections and impose no ordering.
    pub inert: BTreeSet<usize>,
}

impl Flow {
    /// Flow whose order is exactly the one the flow conditions force.
    pub fn induced(graph: &OpenGraph, successor: BTreeMap<usize, usize>) -> Flow {
        Flow::induced_with_inert(graph, successor, BTreeSet::new())
    }

    /// As [`Flow::induced`], with `inert` vertices exempt from Z corrections.
    pub fn induced_with_inert(graph: &OpenGraph, successor: BTreeMap<usize, usize>, inert: BTreeSet<usize>) -> Flow {
        let mut order = Vec::new();
        for (&i, &fi) in &successor {
            order.push((i, fi));
            for j in graph.neighbours(fi) {
                if j != i && !inert.contains(&j) {
                    order.push((i, j));
                }
            }
        }
        order.sort_unstable();
        order.dedup();
        Flow { successor, order, inert }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPattern {
    pub graph: OpenGraph,
    /// Angles for every measured (non-output) vertex.
    pub angles: BTreeMap<usize, Angle>,
    pub flow: Flow,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlowViolation {
    UnknownVertex(usize),
    /// A vertex in `O^c` has no successor.
    MissingSuccessor(usize),
    /// `f` is defined on an output.
    OutputHasSuccessor(usize),
    SuccessorIsInput { vertex: usize, successor: usize },
    NotAnEdge { vertex: usize, successor: usize },
    NotInjective { first: usize, second: usize, successor: usize },
    /// `before ≼ after` is required but absent from the order.
    OrderMissing { before: usize, after: usize },
    CyclicOrder,
}

impl MeasurementPattern {
    pub fn new(graph: OpenGraph, angles: BTreeMap<usize, Angle>, flow: Flow) -> MeasurementPattern {
        MeasurementPattern { graph, angles, flow }
    }

    /// A line `0 - 1 - … - k` with input 0, output `k`, flow `f(i) = i + 1`.
    pub fn line(angles: &[Angle]) -> MeasurementPattern {
        let k = angles.len();
        let graph = OpenGraph::new(0..=k, (1..=k).map(|i| (i - 1, i)), [0], [k]).expect("line is valid");
        let succ = (0..k).map(|i| (i, i + 1)).collect();
        let flow = Flow::induced(&graph, succ);
        MeasurementPattern { graph, angles: angles.iter().copied().enumerate().collect(), flow }
    }

    /// Vertices in `O^c`.
    pub fn measured(&self) -> impl Iterator<Item = usize> + '_ {
        self.graph.vertices().iter().copied().filter(|v| !self.graph.outputs().contains(v))
    }

    pub fn is_clifford(&self) -> bool {
        self.angles.values().all(|a| a.is_clifford())
    }
}

/// `i ≺⁺ j` reachability over the explicit order.
fn order_closure(p: &MeasurementPattern) -> Result<(Vec<Vec<bool>>, BTreeMap<usize, usize>), FlowViolation> {
    let vs = p.graph.vertices();
    let n = vs.len();
    let idx: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in &p.flow.order {
        let ia = *idx.get(&a).ok_or(FlowViolation::UnknownVertex(a))?;
        let ib = *idx.get(&b).ok_or(FlowViolation::UnknownVertex(b))?;
        reach[ia][ib] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    if (0..n).any(|i| reach[i][i]) {
        return Err(FlowViolation::CyclicOrder);
    }
    Ok((reach, idx))
}

/// All flow violations, including missing successors.
pub fn validate_flow(p: &MeasurementPattern) -> Vec<FlowViolation> {
    let mut out = flow_condition_violations(p);
    for v in p.measured() {
        if !p.flow.successor.contains_key(&v) {
            out.push(FlowViolation::MissingSuccessor(v));
        }
    }
    out.sort();
    out
}

/// Violations of the flow conditions on the vertices where `f` is defined.
pub fn flow_condition_violations(p: &MeasurementPattern) -> Vec<FlowViolation> {
    let g = &p.graph;
    let mut out = Vec::new();
    let (reach, idx) = match order_closure(p) {
        Ok(r) => r,
        Err(e) => return vec![e],
    };
    let precedes = |a: usize, b: usize| a == b || reach[idx[&a]][idx[&b]];
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (&i, &fi) in &p.flow.successor {
        if !g.contains(i) {
            out.push(FlowViolation::UnknownVertex(i));
            continue;
        }
        if !g.contains(fi) {
            out.push(FlowViolation::UnknownVertex(fi));
            continue;
        }
        if g.outputs().contains(&i) {
            out.push(FlowViolation::OutputHasSuccessor(i));
        }
        if g.inputs().contains(&fi) {
            out.push(FlowViolation::SuccessorIsInput { vertex: i, successor: fi });
        }
        if !g.adjacent(i, fi) {
            out.push(FlowViolation::NotAnEdge { vertex: i, successor: fi });
        }
        if let Some(&other) = seen.get(&fi) {
            out.push(FlowViolation::NotInjective { first: other, second: i, successor: fi });
        } else {
            seen.insert(fi, i);
        }
        if !precedes(i, fi) {
            out.push(FlowViolation::OrderMissing { before: i, after: fi });
        }
        for j in g.neighbours(fi) {
            if j != i && !p.flow.inert.contains(&j) && !precedes(i, j) {
                out.push(FlowViolation::OrderMissing { before: i, after: j });
            }
        }
    }
    out.sort();
    out
}

/// Correction dependency sets per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dependencies {
    /// `S_X(i) = f⁻¹(i)`.
    pub x: BTreeMap<usize, BTreeSet<usize>>,
    /// `S_Z(i) = {j ≠ i : i ∈ N(f(j))}`.
    pub z: BTreeMap<usize, BTreeSet<usize>>,
}

impl Dependencies {
    pub fn of(p: &MeasurementPattern) -> Dependencies {
        let mut d = Dependencies::default();
        for &v in p.graph.vertices() {
            d.x.insert(v, BTreeSet::new());
            d.z.insert(v, BTreeSet::new());
        }
        for (&j, &fj) in &p.flow.successor {
            d.x.entry(fj).or_default().insert(j);
            for i in p.graph.neighbours(fj) {
                if i != j && !p.flow.inert.contains(&i) {
                    d.z.entry(i).or_default().insert(j);
                }
            }
        }
        d
    }

    /// `(s_X(i), s_Z(i))` from corrected outcomes.
    pub fn signals(&self, i: usize, outcomes: &BTreeMap<usize, u8>) -> (u8, u8) {
        let parity = |set: Option<&BTreeSet<usize>>| -> u8 {
            set.map_or(0, |s| s.iter().fold(0u8, |acc, j| acc ^ outcomes.get(j).copied().unwrap_or(0)))
        };
        (parity(self.x.get(&i)), parity(self.z.get(&i)))
    }
}

/// `φ' = (−1)^{s_X} φ + s_Z π`.
pub fn corrected_angle(phi: Angle, s_x: u8, s_z: u8) -> Angle {
    phi.signed(s_x).plus_pi(s_z)
}

/// Linear extension of the order and correction dependencies over `O^c`,
/// smallest vertex first among ready ones.
pub fn measurement_order(p: &MeasurementPattern) -> Result<Vec<usize>, MbqcError> {
    let (reach, idx) = order_closure(p).map_err(|_| MbqcError::CyclicOrder)?;
    let deps = Dependencies::of(p);
    let measured: Vec<usize> = p.measured().collect();
    let mset: BTreeSet<usize> = measured.iter().copied().collect();
    let mut preds: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &v in &measured {
        let mut ps: BTreeSet<usize> = measured.iter().copied().filter(|&u| reach[idx[&u]][idx[&v]]).collect();
        ps.extend(deps.x[&v].iter().chain(&deps.z[&v]).filter(|u| mset.contains(u)));
        ps.remove(&v);
        preds.insert(v, ps);
    }
    let mut done = BTreeSet::new();
    let mut order = Vec::with_capacity(measured.len());
    while order.len() < measured.len() {
        let next = measured.iter().copied().find(|v| !done.contains(v) && preds[v].iter().all(|u| done.contains(u)));
        let Some(v) = next else { return Err(MbqcError::CyclicOrder) };
        done.insert(v);
        order.push(v);
    }
    Ok(order)
}

/// Supplies measurement outcomes.
pub trait OutcomeSource {
    /// `p_zero` is the Born probability of reading 0.
    fn outcome(&mut self, vertex: usize, p_zero: f64) -> Result<u8, MbqcError>;
}

impl<S: OutcomeSource + ?Sized> OutcomeSource for &mut S {
    fn outcome(&mut self, vertex: usize, p_zero: f64) -> Result<u8, MbqcError> {
        (**self).outcome(vertex, p_zero)
    }
}

/// Samples outcomes from the Born rule.
pub struct Sample<'a, R: RngCore + ?Sized>(pub &'a mut R);

impl<R: RngCore + ?Sized> OutcomeSource for Sample<'_, R> {
    fn outcome(&mut self, _vertex: usize, p_zero: f64) -> Result<u8, MbqcError> {
        Ok(u8::from(self.0.gen::<f64>() >= p_zero))
    }
}

/// Replays fixed outcomes keyed by vertex.
#[derive(Clone, Debug, Default)]
pub struct Forced(pub BTreeMap<usize, u8>);

impl OutcomeSource for Forced {
    fn outcome(&mut self, vertex: usize, _p_zero: f64) -> Result<u8, MbqcError> {
        self.0.get(&vertex).copied().ok_or(MbqcError::MissingForcedOutcome(vertex))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternRun {
    /// Corrected outcome `s(i)` per measured vertex (raw outcome with any
    /// deviation flip, as reported).
    pub outcomes: BTreeMap<usize, u8>,
    /// Corrected output state over the sorted output vertices.
    pub output: QuantumState,
    /// Probability of this branch.
    pub probability: f64,
}

fn prepare(p: &MeasurementPattern, input: &QuantumState) -> Result<QuantumState, MbqcError> {
    let g = &p.graph;
    if g.len() > MAX_STATEVECTOR_QUBITS {
        return Err(MbqcError::CapExceeded { limit: MAX_STATEVECTOR_QUBITS, actual: g.len() });
    }
    for &q in input.labels() {
        if !g.contains(q) {
            return Err(MbqcError::InputNotInGraph(q));
        }
    }
    for &v in g.inputs() {
        if !input.labels().contains(&v) {
            return Err(MbqcError::MissingInput(v));
        }
    }
    for v in p.measured() {
        if !p.angles.contains_key(&v) {
            return Err(MbqcError::MissingAngle(v));
        }
    }
    let mut s = input.clone();
    for &v in g.vertices() {
        if !input.labels().contains(&v) {
            s.push_qubit(v, LocalState::PLUS)?;
        }
    }
    for (a, b) in g.edges() {
        s.apply_cz(a, b)?;
    }
    Ok(s)
}

/// Rotates vertex `v` into its measurement frame and applies the deviation.
fn rotate(s: &mut QuantumState, v: usize, angle: Angle, dev: Pauli) -> Result<(), StateError> {
    s.apply_phase(v, -angle)?;
    s.apply_h(v)?;
    if dev != Pauli::I {
        s.apply_pauli(v, dev)?;
    }
    Ok(())
}

fn finish(p: &MeasurementPattern, deps: &Dependencies, mut s: QuantumState, outcomes: &BTreeMap<usize, u8>, dev: &PauliDeviation) -> Result<QuantumState, MbqcError> {
    for &o in p.graph.outputs() {
        s.apply_pauli(o, dev.get(o))?;
        let (sx, sz) = deps.signals(o, outcomes);
        if sx == 1 {
            s.apply_pauli(o, Pauli::X)?;
        }
        if sz == 1 {
            s.apply_pauli(o, Pauli::Z)?;
        }
    }
    let outs: Vec<usize> = p.graph.outputs().iter().copied().collect();
    Ok(s.permuted(&outs)?)
}

/// Executes the pattern on a dense state vector. `input` covers every input
/// vertex and may cover further vertices; the rest start in `|+⟩`.
pub fn run_pattern<S: OutcomeSource + ?Sized>(
    p: &MeasurementPattern,
    input: &QuantumState,
    source: &mut S,
    deviation: &PauliDeviation,
) -> Result<PatternRun, MbqcError> {
    let order = measurement_order(p)?;
    let deps = Dependencies::of(p);
    let mut s = prepare(p, input)?;
    let mut outcomes = BTreeMap::new();
    let mut probability = 1.0;
    for &v in &order {
        let (sx, sz) = deps.signals(v, &outcomes);
        rotate(&mut s, v, corrected_angle(p.angles[&v], sx, sz), deviation.get(v))?;
        let p0 = s.prob_zero(v)?;
        let b = source.outcome(v, p0)?;
        probability *= s.measure_remove(v, b).map_err(|_| MbqcError::ImpossibleOutcome { vertex: v, outcome: b })?;
        outcomes.insert(v, b);
    }
    let output = finish(p, &deps, s, &outcomes, deviation)?;
    Ok(PatternRun { outcomes, output, probability })
}

/// Every branch with non-negligible probability.
pub fn enumerate_branches(p: &MeasurementPattern, input: &QuantumState, deviation: &PauliDeviation) -> Result<Vec<PatternRun>, MbqcError> {
    let order = measurement_order(p)?;
    let deps = Dependencies::of(p);
    let s = prepare(p, input)?;
    let mut out = Vec::new();
    let mut outcomes = BTreeMap::new();
    branch(p, &deps, &order, 0, s, &mut outcomes, 1.0, deviation, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn branch(
    p: &MeasurementPattern,
    deps: &Dependencies,
    order: &[usize],
    k: usize,
    mut s: QuantumState,
    outcomes: &mut BTreeMap<usize, u8>,
    prob: f64,
    dev: &PauliDeviation,
    out: &mut Vec<PatternRun>,
) -> Result<(), MbqcError> {
    if k == order.len() {
        let output = finish(p, deps, s, outcomes, dev)?;
        out.push(PatternRun { outcomes: outcomes.clone(), output, probability: prob });
        return Ok(());
    }
    let v = order[k];
    let (sx, sz) = deps.signals(v, outcomes);
    rotate(&mut s, v, corrected_angle(p.angles[&v], sx, sz), dev.get(v))?;
    let p0 = s.prob_zero(v)?;
    for (b, pb) in [(0u8, p0), (1u8, 1.0 - p0)] {
        if pb * prob < crate::state::ZERO_PROBABILITY {
            continue;
        }
        let mut t = s.clone();
        t.measure_remove(v, b)?;
        outcomes.insert(v, b);
        branch(p, deps, order, k + 1, t, outcomes, prob * pb, dev, out)?;
        outcomes.remove(&v);
    }
    Ok(())
}

/// Exact distribution of the outcome string on `observe` (measured vertices).
pub fn outcome_distribution(p: &MeasurementPattern, input: &QuantumState, deviation: &PauliDeviation, observe: &[usize]) -> Result<BTreeMap<Vec<u8>, f64>, MbqcError> {
    let mut dist = BTreeMap::new();
    for b in enumerate_branches(p, input, deviation)? {
        let key: Vec<u8> = observe.iter().map(|v| b.outcomes.get(v).copied().unwrap_or(0)).collect();
        *dist.entry(key).or_insert(0.0) += b.probability;
    }
    Ok(dist)
}

/// Result of a stabiliser-backed run.
#[derive(Clone, Debug)]
pub struct CliffordRun {
    pub outcomes: BTreeMap<usize, u8>,
    /// Full register; measured qubits are left collapsed in place.
    pub tableau: Tableau,
    /// Dense tableau index of each vertex.
    pub qubit: BTreeMap<usize, usize>,
}

/// Prepares a tableau for the pattern: `input` preparations (others `|+⟩`) and CZ on every edge.
pub fn clifford_prepare(g: &OpenGraph, input: &ProductState) -> Result<(Tableau, BTreeMap<usize, usize>), MbqcError> {
    let qubit: BTreeMap<usize, usize> = g.vertices().iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut t = Tableau::new(g.len());
    for (&v, &q) in &qubit {
        let ls = input.get(&v).copied().unwrap_or(LocalState::PLUS);
        match ls {
            LocalState::Zero => {}
            LocalState::One => t.pauli(q, Pauli::X),
            LocalState::PlusTheta(a) => {
                if !a.is_clifford() {
                    return Err(MbqcError::NotClifford(v));
                }
                t.h(q);
                for _ in 0..a.k() / 2 {
                    t.s(q);
                }
            }
        }
    }
    for &v in input.keys() {
        if !g.contains(v) {
            return Err(MbqcError::InputNotInGraph(v));
        }
    }
    for (a, b) in g.edges() {
        t.cz(qubit[&a], qubit[&b]);
    }
    Ok((t, qubit))
}

/// Applies `Z(−angle)`, H and the deviation to qubit `q` (Clifford angles only).
pub fn clifford_rotate(t: &mut Tableau, q: usize, angle: Angle, dev: Pauli) {
    debug_assert!(angle.is_clifford());
    // Z(−kπ/4) = S^{−k/2} up to phase.
    for _ in 0..(8 - angle.k()) % 8 / 2 {
        t.s(q);
    }
    t.h(q);
    if dev != Pauli::I {
        t.pauli(q, dev);
    }
}

/// Executes a Clifford pattern on the stabiliser tableau.
pub fn run_clifford_pattern<S: OutcomeSource + ?Sized>(
    p: &MeasurementPattern,
    input: &ProductState,
    source: &mut S,
    deviation: &PauliDeviation,
) -> Result<CliffordRun, MbqcError> {
    if let Some((&v, _)) = p.angles.iter().find(|(_, a)| !a.is_clifford()) {
        return Err(MbqcError::NotClifford(v));
    }
    for v in p.measured() {
        if !p.angles.contains_key(&v) {
            return Err(MbqcError::MissingAngle(v));
        }
    }
    let order = measurement_order(p)?;
    let deps = Dependencies::of(p);
    let (mut t, qubit) = clifford_prepare(&p.graph, input)?;
    let mut outcomes = BTreeMap::new();
    for &v in &order {
        let q = qubit[&v];
        let (sx, sz) = deps.signals(v, &outcomes);
        clifford_rotate(&mut t, q, corrected_angle(p.angles[&v], sx, sz), deviation.get(v));
        let det = t.deterministic_outcome(q);
        let p0 = match det {
            Some(0) => 1.0,
            Some(_) => 0.0,
            None => 0.5,
        };
        let b = source.outcome(v, p0)? & 1;
        if det.is_some_and(|d| d != b) {
            return Err(MbqcError::ImpossibleOutcome { vertex: v, outcome: b });
        }
        t.measure(q, || b);
        outcomes.insert(v, b);
    }
    for &o in p.graph.outputs() {
        let q = qubit[&o];
        t.pauli(q, deviation.get(o));
        let (sx, sz) = deps.signals(o, &outcomes);
        if sx == 1 {
            t.pauli(q, Pauli::X);
        }
        if sz == 1 {
            t.pauli(q, Pauli::Z);
        }
    }
    Ok(CliffordRun { outcomes, tableau: t, qubit })
}

/// Exact outcome distribution of a Clifford pattern on `observe`, by
/// branching on every random measurement.
pub fn clifford_outcome_distribution(
    p: &MeasurementPattern,
    input: &ProductState,
    deviation: &PauliDeviation,
    observe: &[usize],
) -> Result<BTreeMap<Vec<u8>, Rational>, MbqcError> {
    if let Some((&v, _)) = p.angles.iter().find(|(_, a)| !a.is_clifford()) {
        return Err(MbqcError::NotClifford(v));
    }
    let order = measurement_order(p)?;
    let deps = Dependencies::of(p);
    let (t, qubit) = clifford_prepare(&p.graph, input)?;
    for v in p.measured() {
        if !p.angles.contains_key(&v) {
            return Err(MbqcError::MissingAngle(v));
        }
    }
    // A measurement whose outcome no observed vertex depends on is a local
    // channel on a qubit that is then traced out, so it cannot move the
    // observed marginal. Only the signal ancestors of `observe` are branched.
    let mut relevant: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = observe.to_vec();
    while let Some(v) = stack.pop() {
        if relevant.insert(v) {
            for set in [deps.x.get(&v), deps.z.get(&v)].into_iter().flatten() {
                stack.extend(set.iter().copied());
            }
        }
    }
    let order: Vec<usize> = order.into_iter().filter(|v| relevant.contains(v)).collect();
    let mut dist = BTreeMap::new();
    let mut outcomes = BTreeMap::new();
    clifford_branch(p, &deps, &order, &qubit, 0, t, &mut outcomes, 0, deviation, observe, &mut dist);
    Ok(dist)
}

#[allow(clippy::too_many_arguments)]
fn clifford_branch(
    p: &MeasurementPattern,
    deps: &Dependencies,
    order: &[usize],
    qubit: &BTreeMap<usize, usize>,
    k: usize,
    mut t: Tableau,
    outcomes: &mut BTreeMap<usize, u8>,
    depth: u32,
    dev: &PauliDeviation,
    observe: &[usize],
    dist: &mut BTreeMap<Vec<u8>, Rational>,
) {
    if k == order.len() {
        let key: Vec<u8> = observe.iter().map(|v| outcomes.get(v).copied().unwrap_or(0)).collect();
        let w = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(2), depth as usize));
        *dist.entry(key).or_insert_with(|| Rational::from_integer(0.into())) += w;
        return;
    }
    let v = order[k];
    let q = qubit[&v];
    let (sx, sz) = deps.signals(v, outcomes);
    clifford_rotate(&mut t, q, corrected_angle(p.angles[&v], sx, sz), dev.get(v));
    match t.deterministic_outcome(q) {
        Some(b) => {
            outcomes.insert(v, b);
            clifford_branch(p, deps, order, qubit, k + 1, t, outcomes, depth, dev, observe, dist);
        }
        None => {
            for b in [0u8, 1] {
                let mut u = t.clone();
                u.measure(q, || b);
                outcomes.insert(v, b);
                clifford_branch(p, deps, order, qubit, k + 1, u, outcomes, depth + 1, dev, observe, dist);
            }
        }
    }
    outcomes.remove(&v);
}
