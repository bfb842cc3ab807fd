//! Exact detection, insensitivity and correctness of canvases and schemes.
//!
//! Deviations act in the measurement frame: after a trap vertex is rotated
//! and Hadamard-ed, X or Y flips its outcome and Z does nothing. Reject
//! probabilities therefore depend only on the XY-support of a deviation, so
//! symbolic families are enumerated as one representative (X on the support)
//! per support.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::angle::Angle;
use crate::graph::{GraphError, OpenGraph};
use crate::mbqc::{self, MbqcError};
use crate::pauli::{Pauli, PauliDeviation};
use crate::rational::Rational;
use crate::state::{LocalState, ProductState, QuantumState};
use crate::tableau::Tableau;
use crate::traps::{CanvasKind, TrappifiedCanvas, TrappifiedPattern, TrappifiedScheme};

/// Largest graph whose deviation families are enumerated when every canvas has a predicate.
pub const PREDICATE_CAP: usize = 12;
/// Largest graph whose deviation families are enumerated when some canvas needs simulation.
pub const SIMULATION_CAP: usize = 8;
/// Most checked vertices a simulated canvas may branch over.
pub const MAX_CHECKED_VERTICES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("enumeration needs {actual} vertices but the cap is {limit}")]
    CapExceeded { limit: usize, actual: usize },
    #[error("deviation set is empty")]
    EmptySet,
    #[error("weight band needs the graph size {len} to be a multiple of {rounds} rounds")]
    BadRounds { len: usize, rounds: usize },
    #[error("canvas prepares non-stabiliser state on vertex {0}")]
    NotClifford(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
}

/// A set of Pauli deviations, either listed or described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeviationSet {
    Explicit(Vec<PauliDeviation>),
    /// Every deviation with at least one X or Y.
    AllXY,
    /// Every deviation, the identity included.
    AllPauli,
    /// Deviations made of I and Z only.
    ZOnly,
    /// Deviations on `rounds` equal blocks of vertices whose restriction lies
    /// in `base` on at least `k_min` and fewer than `k_max` blocks.
    WeightBand { base: Box<DeviationSet>, rounds: usize, k_min: usize, k_max: Option<usize> },
}

impl DeviationSet {
    /// Whether `dev` belongs to the set, up to the XY-support for symbolic families.
    pub fn contains(&self, g: &OpenGraph, dev: &PauliDeviation) -> bool {
        match self {
            DeviationSet::Explicit(list) => list.contains(dev),
            DeviationSet::AllXY => !dev.xy_support().is_empty(),
            DeviationSet::AllPauli => true,
            DeviationSet::ZOnly => dev.is_z_only(),
            DeviationSet::WeightBand { base, rounds, k_min, k_max } => {
                let Ok(blocks) = round_blocks(g, *rounds) else { return false };
                let wt = blocks.iter().filter(|b| base.contains(g, &dev.restrict(b))).count();
                wt >= *k_min && k_max.map_or(true, |k| wt < k)
            }
        }
    }

    /// One representative per class of equal reject behaviour. Explicit lists
    /// are deduplicated but otherwise kept as written.
    pub fn representatives(&self, g: &OpenGraph, cap: usize) -> Result<Vec<PauliDeviation>, AnalysisError> {
        let out = match self {
            DeviationSet::Explicit(list) => {
                let mut seen = BTreeSet::new();
                list.iter().filter(|d| seen.insert((*d).clone())).cloned().collect()
            }
            DeviationSet::ZOnly => alloc::vec![PauliDeviation::identity()],
            _ => {
                if g.len() > cap {
                    return Err(AnalysisError::CapExceeded { limit: cap, actual: g.len() });
                }
                (0u64..1 << g.len())
                    .map(|m| PauliDeviation::uniform(&g.mask_to_set(m), Pauli::X))
                    .filter(|d| self.contains(g, d))
                    .collect()
            }
        };
        if let DeviationSet::WeightBand { rounds, .. } = self {
            round_blocks(g, *rounds)?;
        }
        Ok(out)
    }
}

fn round_blocks(g: &OpenGraph, rounds: usize) -> Result<Vec<BTreeSet<usize>>, AnalysisError> {
    if rounds == 0 || g.len() % rounds != 0 {
        return Err(AnalysisError::BadRounds { len: g.len(), rounds });
    }
    let per = g.len() / rounds;
    Ok(g.vertices().chunks(per).map(|c| c.iter().copied().collect()).collect())
}

/// Exact probability that `canvas` rejects under `dev`.
pub fn reject_probability(g: &OpenGraph, canvas: &TrappifiedCanvas, dev: &PauliDeviation) -> Result<Rational, AnalysisError> {
    let hit = |h: &BTreeSet<usize>| dev.iter().filter(|(v, p)| p.has_x() && h.contains(v)).count();
    Ok(match &canvas.kind {
        CanvasKind::Standard { h } => bool_rational(hit(h) > 0),
        CanvasKind::General { h } => bool_rational(hit(h) % 2 == 1),
        CanvasKind::Custom => simulate_reject_probability(g, canvas, dev)?,
    })
}

fn bool_rational(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Reject probability by stabiliser simulation of the canvas alone.
///
/// Only `V_T ∪ N(V_T)` is simulated. Free neighbours are left unmeasured:
/// tracing them out dephases their trap neighbours exactly as measuring them
/// at any angle would, so the marginal on trap outcomes is unchanged.
pub fn simulate_reject_probability(g: &OpenGraph, canvas: &TrappifiedCanvas, dev: &PauliDeviation) -> Result<Rational, AnalysisError> {
    let vt = canvas.trap_vertices();
    let region: BTreeSet<usize> = vt.iter().copied().chain(g.neighbourhood(vt)).collect();
    let qubit: BTreeMap<usize, usize> = region.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut t = Tableau::new(region.len());
    for (&v, &q) in &qubit {
        prepare(&mut t, q, canvas.sigma.get(&v).copied().unwrap_or(LocalState::PLUS)).map_err(|_| AnalysisError::NotClifford(v))?;
    }
    for (a, b) in g.edges() {
        if let (Some(&qa), Some(&qb)) = (qubit.get(&a), qubit.get(&b)) {
            t.cz(qa, qb);
        }
    }
    let checked: Vec<usize> = canvas.checks.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if checked.len() > MAX_CHECKED_VERTICES {
        return Err(AnalysisError::CapExceeded { limit: MAX_CHECKED_VERTICES, actual: checked.len() });
    }
    for &v in &checked {
        mbqc::clifford_rotate(&mut t, qubit[&v], Angle::ZERO, dev.get(v));
    }
    let mut outcomes = BTreeMap::new();
    let mut reject = Rational::zero();
    branch(&mut t.clone(), &checked, &qubit, 0, Rational::one(), &mut outcomes, &mut |o, w| {
        if canvas.rejects(o) {
            reject += w;
        }
    });
    Ok(reject)
}

fn prepare(t: &mut Tableau, q: usize, ls: LocalState) -> Result<(), ()> {
    match ls {
        LocalState::Zero => {}
        LocalState::One => t.pauli(q, Pauli::X),
        LocalState::PlusTheta(a) => {
            if !a.is_clifford() {
                return Err(());
            }
            t.h(q);
            for _ in 0..a.k() / 2 {
                t.s(q);
            }
        }
    }
    Ok(())
}

fn branch(
    t: &mut Tableau,
    order: &[usize],
    qubit: &BTreeMap<usize, usize>,
    k: usize,
    weight: Rational,
    outcomes: &mut BTreeMap<usize, u8>,
    leaf: &mut impl FnMut(&BTreeMap<usize, u8>, Rational),
) {
    let Some(&v) = order.get(k) else {
        leaf(outcomes, weight);
        return;
    };
    let q = qubit[&v];
    match t.deterministic_outcome(q) {
        Some(b) => {
            outcomes.insert(v, b);
            branch(t, order, qubit, k + 1, weight, outcomes, leaf);
        }
        None => {
            let half = weight / Rational::from_integer(2.into());
            for b in 0..2u8 {
                let mut u = t.clone();
                u.measure(q, || b);
                outcomes.insert(v, b);
                branch(&mut u, order, qubit, k + 1, half.clone(), outcomes, leaf);
            }
        }
    }
    outcomes.remove(&v);
}

/// Exact reject probability of a full trappified pattern (trap plus embedded
/// computation) under `dev`. Every angle and preparation must be Clifford.
pub fn pattern_reject_probability(tp: &TrappifiedPattern, dev: &PauliDeviation) -> Result<Rational, AnalysisError> {
    let checked: Vec<usize> = tp.checks.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let dist = mbqc::clifford_outcome_distribution(&tp.pattern, &tp.preparation, dev, &checked)?;
    let mut reject = Rational::zero();
    for (bits, w) in dist {
        let t: BTreeMap<usize, u8> = checked.iter().copied().zip(bits).collect();
        if tp.rejects(&t) {
            reject += w;
        }
    }
    Ok(reject)
}

/// `Σ_T p(T) · Pr[reject | T, dev]`.
pub fn scheme_reject_probability(s: &TrappifiedScheme, dev: &PauliDeviation) -> Result<Rational, AnalysisError> {
    let mut acc = Rational::zero();
    for (c, w) in s.canvases.iter().zip(&s.weights) {
        acc += w * reject_probability(&s.graph, c, dev)?;
    }
    Ok(acc)
}

fn enumeration_cap(s: &TrappifiedScheme) -> usize {
    if s.canvases.iter().any(|c| c.kind == CanvasKind::Custom && !c.checks.is_empty()) {
        SIMULATION_CAP
    } else {
        PREDICATE_CAP
    }
}

/// Weighted reject probability of every representative of `set`.
pub fn evaluate(s: &TrappifiedScheme, set: &DeviationSet) -> Result<Vec<(PauliDeviation, Rational)>, AnalysisError> {
    let reps = set.representatives(&s.graph, enumeration_cap(s))?;
    if reps.is_empty() {
        return Err(AnalysisError::EmptySet);
    }
    reps.into_iter()
        .map(|d| {
            let r = scheme_reject_probability(s, &d)?;
            Ok((d, r))
        })
        .collect()
}

/// Extremal value over a deviation set, with the deviation attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremum {
    pub value: Rational,
    pub witness: PauliDeviation,
}

/// `ε`, `δ` and their witnesses. Detection rate is `1 − ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeReport {
    pub epsilon: Extremum,
    pub delta: Extremum,
    pub deviations_checked: usize,
}

impl SchemeReport {
    pub fn detection_rate(&self) -> Rational {
        Rational::one() - &self.epsilon.value
    }
}

/// `ε = 1 − min_E reject`; the first minimiser in enumeration order is the witness.
pub fn scheme_epsilon(s: &TrappifiedScheme, set: &DeviationSet) -> Result<Extremum, AnalysisError> {
    Ok(epsilon_of(&evaluate(s, set)?))
}

/// `δ = 1 − min_E accept = max_E reject`.
pub fn scheme_delta(s: &TrappifiedScheme, set: &DeviationSet) -> Result<Extremum, AnalysisError> {
    Ok(delta_of(&evaluate(s, set)?))
}

pub fn scheme_report(s: &TrappifiedScheme, set: &DeviationSet) -> Result<SchemeReport, AnalysisError> {
    let rows = evaluate(s, set)?;
    Ok(SchemeReport { epsilon: epsilon_of(&rows), delta: delta_of(&rows), deviations_checked: rows.len() })
}

/// Reduces `(deviation, reject)` rows to `ε`; rows must be non-empty.
pub fn epsilon_of(rows: &[(PauliDeviation, Rational)]) -> Extremum {
    let (d, r) = rows.iter().fold(&rows[0], |best, row| if row.1 < best.1 { row } else { best });
    Extremum { value: Rational::one() - r, witness: d.clone() }
}

/// Reduces `(deviation, reject)` rows to `δ`; rows must be non-empty.
pub fn delta_of(rows: &[(PauliDeviation, Rational)]) -> Extremum {
    let (d, r) = rows.iter().fold(&rows[0], |best, row| if row.1 > best.1 { row } else { best });
    Extremum { value: r.clone(), witness: d.clone() }
}

/// The deviation in `set` least likely to be caught, and its accept probability.
pub fn optimal_attack(s: &TrappifiedScheme, set: &DeviationSet) -> Result<(PauliDeviation, Rational), AnalysisError> {
    let e = scheme_epsilon(s, set)?;
    Ok((e.witness, e.value))
}

/// `ν` over classical outputs and its witness.
#[derive(Clone, Debug, PartialEq)]
pub struct NuReport {
    pub nu: f64,
    pub witness: PauliDeviation,
    /// No instance carries a computation, so `ν` is trivially 0.
    pub pure_trap: bool,
}

/// Distribution of the classical outputs of `tp` under `dev`, with the
/// computation inputs overridden by `input`.
pub fn classical_output_distribution(tp: &TrappifiedPattern, input: &ProductState, dev: &PauliDeviation) -> Result<BTreeMap<Vec<u8>, f64>, AnalysisError> {
    let mut prep = tp.preparation.clone();
    prep.extend(input.iter().map(|(&v, &l)| (v, l)));
    let clifford = tp.pattern.is_clifford() && prep.values().all(|l| l.is_clifford());
    if clifford {
        let d = mbqc::clifford_outcome_distribution(&tp.pattern, &prep, dev, &tp.classical_outputs)?;
        return Ok(d.into_iter().map(|(k, w)| (k, crate::rational::to_f64(&w))).collect());
    }
    let state = QuantumState::product(&prep).map_err(MbqcError::from)?;
    Ok(mbqc::outcome_distribution(&tp.pattern, &state, dev, &tp.classical_outputs)?)
}

/// Total variation distance between two finite distributions.
pub fn total_variation(a: &BTreeMap<Vec<u8>, f64>, b: &BTreeMap<Vec<u8>, f64>) -> f64 {
    let keys: BTreeSet<&Vec<u8>> = a.keys().chain(b.keys()).collect();
    keys.into_iter().map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs()).sum::<f64>() / 2.0
}

/// `ν = max_{E, input} Σ_T p(T) · TV(outputs under E, outputs under I)`.
pub fn scheme_nu(instances: &[(Rational, TrappifiedPattern)], deviations: &[PauliDeviation], inputs: &[ProductState]) -> Result<NuReport, AnalysisError> {
    if deviations.is_empty() {
        return Err(AnalysisError::EmptySet);
    }
    let pure_trap = instances.iter().all(|(_, tp)| tp.classical_outputs.is_empty());
    let no_override = [ProductState::new()];
    let inputs = if inputs.is_empty() { &no_override[..] } else { inputs };
    let mut best = NuReport { nu: 0.0, witness: deviations[0].clone(), pure_trap };
    if pure_trap {
        return Ok(best);
    }
    let ideal: Vec<Vec<BTreeMap<Vec<u8>, f64>>> = inputs
        .iter()
        .map(|inp| instances.iter().map(|(_, tp)| classical_output_distribution(tp, inp, &PauliDeviation::identity())).collect())
        .collect::<Result<_, _>>()?;
    for dev in deviations {
        for (inp, ideal) in inputs.iter().zip(&ideal) {
            let mut nu = 0.0;
            for ((w, tp), id) in instances.iter().zip(ideal) {
                let real = classical_output_distribution(tp, inp, dev)?;
                nu += crate::rational::to_f64(w) * total_variation(&real, id);
            }
            if nu > best.nu {
                best = NuReport { nu, witness: dev.clone(), pure_trap };
            }
        }
    }
    Ok(best)
}
