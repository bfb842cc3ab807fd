//! Optimal test distributions as an exact max-min LP.
//!
//! For tests `T` and errors `E` with detection probabilities `R[t][e]`:
//!
//! ```text
//! max ε   s.t.  Σ_t p_t ≤ 1,   ε − Σ_t R[t][e] p_t ≤ 0  for every e,   p, ε ≥ 0.
//! ```
//!
//! The dual variables of the error rows form a distribution over errors that
//! no test distribution detects with probability above the optimum.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::analysis::{self, AnalysisError, DeviationSet};
use crate::graph::{self, GraphError, OpenGraph};
use crate::lp::{self, LpError};
use crate::pauli::PauliDeviation;
use crate::rational::Rational;
use crate::traps::{build_general_trap, build_standard_trap, TrapError, TrappifiedCanvas, TrappifiedScheme};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("error set is empty")]
    EmptyErrors,
    #[error("no candidate tests")]
    EmptyTests,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Detection probabilities of candidate tests against error classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestErrorRelation {
    pub tests: Vec<TrappifiedCanvas>,
    /// One representative per distinct detection column.
    pub errors: Vec<PauliDeviation>,
    /// Number of enumerated deviations merged into each column.
    pub class_sizes: Vec<usize>,
    /// `detects[t][e]`; 0 or 1 for predicate traps.
    pub detects: Vec<Vec<Rational>>,
}

impl TestErrorRelation {
    pub fn column(&self, e: usize) -> Vec<Rational> {
        self.detects.iter().map(|row| row[e].clone()).collect()
    }
}

pub fn build_relation(g: &OpenGraph, tests: Vec<TrappifiedCanvas>, set: &DeviationSet) -> Result<TestErrorRelation, OptimizerError> {
    if tests.is_empty() {
        return Err(OptimizerError::EmptyTests);
    }
    let cap = if tests.iter().any(|t| t.h().is_none()) { analysis::SIMULATION_CAP } else { analysis::PREDICATE_CAP };
    let reps = set.representatives(g, cap)?;
    if reps.is_empty() {
        return Err(OptimizerError::EmptyErrors);
    }
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    let mut errors = Vec::new();
    let mut class_sizes = Vec::new();
    for d in reps {
        let col = tests.iter().map(|t| analysis::reject_probability(g, t, &d)).collect::<Result<Vec<_>, _>>()?;
        match columns.iter().position(|c| *c == col) {
            Some(i) => class_sizes[i] += 1,
            None => {
                columns.push(col);
                errors.push(d);
                class_sizes.push(1);
            }
        }
    }
    let detects = (0..tests.len()).map(|t| columns.iter().map(|c| c[t].clone()).collect()).collect();
    Ok(TestErrorRelation { tests, errors, class_sizes, detects })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalDistribution {
    /// One weight per test; sums to 1 unless the rate is 0.
    pub weights: Vec<Rational>,
    /// Worst-case detection probability.
    pub rate: Rational,
    /// Optimal attack: one weight per error column, summing to 1.
    pub attack: Vec<Rational>,
    /// Some other optimal vertex may exist.
    pub non_unique: bool,
    /// An error column no test detects, when there is one.
    pub undetected: Option<usize>,
}

/// Columns that are entrywise at least another column never bind at the optimum.
fn minimal_columns(rel: &TestErrorRelation) -> Vec<usize> {
    let cols: Vec<Vec<Rational>> = (0..rel.errors.len()).map(|e| rel.column(e)).collect();
    let mut order: Vec<usize> = (0..cols.len()).collect();
    let mass = |c: &Vec<Rational>| c.iter().fold(Rational::zero(), |a, b| a + b);
    order.sort_by_cached_key(|&e| mass(&cols[e]));
    let mut kept: Vec<usize> = Vec::new();
    for e in order {
        let dominated = kept.iter().any(|&k| cols[k].iter().zip(&cols[e]).all(|(a, b)| a <= b));
        if !dominated {
            kept.push(e);
        }
    }
    kept.sort_unstable();
    kept
}

pub fn solve_distribution(rel: &TestErrorRelation) -> Result<OptimalDistribution, OptimizerError> {
    let m = rel.tests.len();
    let k = rel.errors.len();
    if m == 0 {
        return Err(OptimizerError::EmptyTests);
    }
    if k == 0 {
        return Err(OptimizerError::EmptyErrors);
    }
    if let Some(e) = (0..k).find(|&e| rel.detects.iter().all(|row| row[e].is_zero())) {
        let mut attack = alloc::vec![Rational::zero(); k];
        attack[e] = Rational::one();
        let mut weights = alloc::vec![Rational::zero(); m];
        weights[0] = Rational::one();
        return Ok(OptimalDistribution { weights, rate: Rational::zero(), attack, non_unique: true, undetected: Some(e) });
    }
    let kept = minimal_columns(rel);
    // Columns: p_0..p_{m-1}, ε.
    let mut a = Vec::with_capacity(kept.len() + 1);
    let mut row = alloc::vec![Rational::one(); m];
    row.push(Rational::zero());
    a.push(row);
    for &e in &kept {
        let mut row: Vec<Rational> = rel.detects.iter().map(|r| -r[e].clone()).collect();
        row.push(Rational::one());
        a.push(row);
    }
    let mut b = alloc::vec![Rational::zero(); kept.len() + 1];
    b[0] = Rational::one();
    let mut c = alloc::vec![Rational::zero(); m];
    c.push(Rational::one());
    let sol = lp::maximize(&a, &b, &c)?;
    let mut attack = alloc::vec![Rational::zero(); k];
    for (i, &e) in kept.iter().enumerate() {
        attack[e] = sol.dual[i + 1].clone();
    }
    Ok(OptimalDistribution { weights: sol.primal[..m].to_vec(), rate: sol.value, attack, non_unique: sol.alternative_optima, undetected: None })
}

/// Standard traps on every non-empty independent set.
pub fn standard_candidates(g: &OpenGraph) -> Result<Vec<TrappifiedCanvas>, OptimizerError> {
    let sets = graph::independent_set_masks(g, None)?;
    Ok(sets.into_iter().filter(|&m| m != 0).map(|m| build_standard_trap(g, &g.mask_to_set(m))).collect::<Result<_, _>>()?)
}

/// General traps on every non-empty vertex set.
pub fn general_candidates(g: &OpenGraph) -> Result<Vec<TrappifiedCanvas>, OptimizerError> {
    if g.len() > analysis::PREDICATE_CAP {
        return Err(AnalysisError::CapExceeded { limit: analysis::PREDICATE_CAP, actual: g.len() }.into());
    }
    Ok((1u64..1 << g.len()).map(|m| build_general_trap(g, &g.mask_to_set(m))).collect::<Result<_, _>>()?)
}

/// The scheme made of the tests with positive weight.
pub fn to_scheme(g: &OpenGraph, rel: &TestErrorRelation, dist: &OptimalDistribution) -> Result<TrappifiedScheme, OptimizerError> {
    let (canvases, weights): (Vec<_>, Vec<_>) =
        rel.tests.iter().zip(&dist.weights).filter(|(_, w)| !w.is_zero()).map(|(t, w)| (t.clone(), w.clone())).unzip();
    Ok(TrappifiedScheme::new(g.clone(), canvases, weights)?)
}

/// Standard traps weighted by an optimal fractional colouring: rate `1/χ_f(G)`.
pub fn colouring_distribution(g: &OpenGraph) -> Result<(TrappifiedScheme, Rational), OptimizerError> {
    if g.is_empty() {
        return Err(OptimizerError::EmptyTests);
    }
    let fc = graph::fractional_chromatic_number(g)?;
    let mut canvases = Vec::new();
    let mut weights = Vec::new();
    for (set, x) in &fc.colouring {
        canvases.push(build_standard_trap(g, set)?);
        weights.push(x / &fc.value);
    }
    let rate = Rational::one() / fc.value;
    Ok((TrappifiedScheme::new(g.clone(), canvases, weights)?, rate))
}

/// Sets carrying positive weight, for reporting.
pub fn support(rel: &TestErrorRelation, dist: &OptimalDistribution) -> Vec<BTreeSet<usize>> {
    rel.tests.iter().zip(&dist.weights).filter(|(_, w)| !w.is_zero()).filter_map(|(t, _)| t.h().cloned()).collect()
}
