//! End-to-end trappified delegated computation, adversaries, and Monte-Carlo
//! estimation.
//!
//! Every trial draws from its own ChaCha stream keyed by `(root seed, trial
//! index)`, so results do not depend on how rayon schedules the trials.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use trapkit_core::analysis::{self, AnalysisError};
use trapkit_core::compiler::{majority_vote, CompiledScheme, CompilerMode};
use trapkit_core::mbqc::{MbqcError, Sample};
use trapkit_core::rational::{self, Rational};
use trapkit_core::state::{QuantumState, StateError};
use trapkit_core::traps::{
    embed_dummy_isolated, instantiate_canvas, sample_weighted, GridComputation, GridLayout, TrapError, TrappifiedCanvas,
    TrappifiedPattern, TrappifiedScheme,
};
use trapkit_core::ubqc::{run_blind_session, ClientSecrets, DeviationFrame, ProtocolError};
use trapkit_core::PauliDeviation;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("embedding failed: {0}")]
    EmbeddingFailed(#[from] TrapError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("invalid adversary: {0}")]
    BadAdversary(&'static str),
    #[error("invalid setup: {0}")]
    BadSetup(&'static str),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// What the server does to each session.
#[derive(Clone, Debug, PartialEq)]
pub enum Adversary {
    Honest,
    Fixed(PauliDeviation),
    /// Draws one deviation per session; weights sum to 1.
    Distribution(Vec<(PauliDeviation, Rational)>),
    /// With probability `p_delta` a uniformly chosen benign deviation, else the identity.
    Noisy { p_delta: f64, benign: Vec<PauliDeviation> },
}

impl Adversary {
    pub fn validate(&self) -> Result<(), HarnessError> {
        match self {
            Adversary::Distribution(d) => {
                if d.is_empty() || d.iter().any(|(_, w)| *w < Rational::zero()) {
                    return Err(HarnessError::BadAdversary("distribution needs non-negative weights"));
                }
                if d.iter().map(|(_, w)| w).sum::<Rational>() != Rational::one() {
                    return Err(HarnessError::BadAdversary("distribution weights must sum to 1"));
                }
            }
            Adversary::Noisy { p_delta, benign } => {
                if !(0.0..=1.0).contains(p_delta) {
                    return Err(HarnessError::BadAdversary("p_delta must lie in [0, 1]"));
                }
                if benign.is_empty() && *p_delta > 0.0 {
                    return Err(HarnessError::BadAdversary("noisy adversary needs benign deviations"));
                }
            }
            Adversary::Honest | Adversary::Fixed(_) => {}
        }
        Ok(())
    }

    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> PauliDeviation {
        match self {
            Adversary::Honest => PauliDeviation::identity(),
            Adversary::Fixed(d) => d.clone(),
            Adversary::Distribution(d) => {
                let weights: Vec<Rational> = d.iter().map(|(_, w)| w.clone()).collect();
                d[sample_weighted(&weights, rng)].0.clone()
            }
            Adversary::Noisy { p_delta, benign } => {
                if !benign.is_empty() && rng.gen_bool(*p_delta) {
                    benign[rng.gen_range(0..benign.len())].clone()
                } else {
                    PauliDeviation::identity()
                }
            }
        }
    }
}

/// How a sampled canvas and the client's computation become one pattern.
#[derive(Clone, Debug, PartialEq)]
pub enum Embedding {
    /// The canvas runs alone and produces no output.
    TrapOnly,
    /// Canvas `i` is the block trap at `trap_cols[i]` (`None`: no trap), with
    /// the computation in the rows below.
    Grid { layout: GridLayout, trap_cols: Vec<Option<usize>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub scheme: TrappifiedScheme,
    pub embedding: Embedding,
    pub computation: Option<GridComputation>,
    pub frame: DeviationFrame,
}

impl Protocol {
    pub fn trap_only(scheme: TrappifiedScheme) -> Protocol {
        Protocol { scheme, embedding: Embedding::TrapOnly, computation: None, frame: DeviationFrame::Measurement }
    }

    /// Uniform scheme over block traps at `trap_cols` on a grid.
    pub fn grid(layout: GridLayout, trap_cols: Vec<Option<usize>>, computation: GridComputation) -> Result<Protocol, HarnessError> {
        let canvases = trap_cols
            .iter()
            .map(|c| match c {
                Some(col) => layout.block_trap(*col),
                None => Ok(TrappifiedCanvas::empty()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scheme = TrappifiedScheme::uniform(layout.graph(), canvases)?;
        Ok(Protocol {
            scheme,
            embedding: Embedding::Grid { layout, trap_cols },
            computation: Some(computation),
            frame: DeviationFrame::Measurement,
        })
    }

    /// Canvas `i` with `computation` (or the protocol's own) embedded.
    pub fn instance(&self, i: usize, computation: Option<&GridComputation>) -> Result<TrappifiedPattern, HarnessError> {
        let canvas = &self.scheme.canvases[i];
        match &self.embedding {
            Embedding::TrapOnly => Ok(instantiate_canvas(&self.scheme.graph, canvas)?),
            Embedding::Grid { layout, trap_cols } => {
                let comp = computation.or(self.computation.as_ref()).ok_or(HarnessError::BadSetup("grid embedding needs a computation"))?;
                Ok(embed_dummy_isolated(layout, trap_cols[i], comp)?)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Acc,
    Rej,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionResult {
    pub verdict: Verdict,
    /// Classical output; `None` iff rejected.
    pub output: Option<Vec<u8>>,
    pub canvas: usize,
    pub trap_outcomes: BTreeMap<usize, u8>,
}

/// Stream `trial` of the ChaCha generator seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs one trappified pattern blindly under `dev` and applies its decision.
pub fn run_instance<R: RngCore>(tp: &TrappifiedPattern, dev: &PauliDeviation, frame: DeviationFrame, rng: &mut R) -> Result<(Verdict, BTreeMap<usize, u8>), HarnessError> {
    let input = QuantumState::product(&tp.preparation)?;
    let encrypted: BTreeSet<usize> = tp.pattern.graph.inputs().iter().copied().collect();
    let secrets = ClientSecrets::sample(&tp.pattern.graph, &encrypted, rng);
    let run = run_blind_session(&tp.pattern, &input, secrets, dev, frame, Sample(rng))?;
    let verdict = if tp.rejects(&run.outcomes) { Verdict::Rej } else { Verdict::Acc };
    Ok((verdict, run.outcomes))
}

/// One execution of the trappified delegated blind computation protocol.
pub fn run_protocol3<R: RngCore>(p: &Protocol, computation: Option<&GridComputation>, adversary: &Adversary, rng: &mut R) -> Result<SessionResult, HarnessError> {
    let canvas = p.scheme.sample(rng);
    let mut tp = p.instance(canvas, computation)?;
    tp.randomise_free(rng);
    let dev = adversary.draw(rng);
    let (verdict, outcomes) = run_instance(&tp, &dev, p.frame, rng)?;
    let trap_outcomes = outcomes.iter().filter(|(v, _)| tp.trap.contains(v)).map(|(&v, &b)| (v, b)).collect();
    let output = (verdict == Verdict::Acc).then(|| tp.classical_outputs.iter().map(|v| outcomes[v]).collect());
    Ok(SessionResult { verdict, output, canvas, trap_outcomes })
}

/// Runs `f` for every trial on a pool of `jobs` threads (0: rayon default), in trial order.
pub fn run_trials<T, F>(trials: u64, seed: u64, jobs: usize, f: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T, HarnessError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    pool.install(|| (0..trials).into_par_iter().map(|t| f(t, &mut trial_rng(seed, t))).collect())
}

/// Wilson score interval for `k` successes in `n` trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    /// Binomial standard error of the estimate.
    pub sigma: f64,
}

pub fn wilson(k: u64, n: u64) -> Interval {
    if n == 0 {
        return Interval { estimate: 0.0, lo: 0.0, hi: 1.0, sigma: 0.0 };
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Interval { estimate: p, lo: (centre - half).max(0.0), hi: (centre + half).min(1.0), sigma: (p * (1.0 - p) / n).sqrt() }
}

/// Every output of the honest computation with positive probability.
pub fn reference_outputs(computation: &GridComputation) -> Result<BTreeSet<Vec<u8>>, HarnessError> {
    Ok(exact_outputs(computation)?.into_iter().filter(|(_, p)| *p > 1e-12).map(|(k, _)| k).collect())
}

/// Exact honest output distribution of a computation run without traps.
pub fn exact_outputs(computation: &GridComputation) -> Result<BTreeMap<Vec<u8>, f64>, HarnessError> {
    let tp = TrappifiedPattern {
        pattern: computation.pattern.clone(),
        preparation: computation.input.clone(),
        trap: BTreeSet::new(),
        checks: Vec::new(),
        free: BTreeSet::new(),
        computation: computation.pattern.graph.vertices().iter().copied().collect(),
        classical_outputs: computation.classical_outputs.clone(),
    };
    Ok(analysis::classical_output_distribution(&tp, &Default::default(), &PauliDeviation::identity())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub trials: u64,
    pub accepts: u64,
    pub accept: Interval,
    /// Accepted with an output outside the honest support.
    pub corrupt_accepts: u64,
    pub corrupt_accept: Interval,
}

pub fn estimate_rates(p: &Protocol, adversary: &Adversary, trials: u64, seed: u64, jobs: usize) -> Result<(RateReport, Vec<SessionResult>), HarnessError> {
    adversary.validate()?;
    let reference = p.computation.as_ref().map(reference_outputs).transpose()?;
    let results = run_trials(trials, seed, jobs, |_, rng| run_protocol3(p, None, adversary, rng))?;
    let accepts = results.iter().filter(|r| r.verdict == Verdict::Acc).count() as u64;
    let corrupt = results
        .iter()
        .filter(|r| match (&r.output, &reference) {
            (Some(o), Some(good)) => !good.contains(o),
            _ => false,
        })
        .count() as u64;
    let report = RateReport { trials, accepts, accept: wilson(accepts, trials), corrupt_accepts: corrupt, corrupt_accept: wilson(corrupt, trials) };
    Ok((report, results))
}

/// Result of the real-versus-ideal experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct GameReport {
    pub trials: u64,
    pub real_accept: Interval,
    pub ideal_accept: Interval,
    /// Empirical total variation between the joint (verdict, output) distributions.
    pub advantage: f64,
    /// Standard error of `advantage`, summed over cells.
    pub sigma: f64,
}

/// Real sessions of `real` against the ideal resource plus a simulator that
/// drives the trap machinery with `empty` and, on accept, releases an exact
/// sample of `real`'s honest output.
pub fn distinguishing_game(
    p: &Protocol,
    real: &GridComputation,
    empty: &GridComputation,
    adversary: &Adversary,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<GameReport, HarnessError> {
    adversary.validate()?;
    let ideal_outputs: Vec<(Vec<u8>, f64)> = exact_outputs(real)?.into_iter().collect();
    let real_runs = run_trials(trials, seed, jobs, |_, rng| {
        let r = run_protocol3(p, Some(real), adversary, rng)?;
        Ok(r.output)
    })?;
    let ideal_runs = run_trials(trials, seed ^ 0x9e37_79b9_7f4a_7c15, jobs, |_, rng| {
        let r = run_protocol3(p, Some(empty), adversary, rng)?;
        Ok(match r.verdict {
            Verdict::Rej => None,
            Verdict::Acc => {
                let mut x: f64 = rng.gen();
                let mut pick = &ideal_outputs[ideal_outputs.len() - 1].0;
                for (o, q) in &ideal_outputs {
                    if x < *q {
                        pick = o;
                        break;
                    }
                    x -= q;
                }
                Some(pick.clone())
            }
        })
    })?;
    let count = |runs: &[Option<Vec<u8>>]| {
        let mut m: BTreeMap<Option<Vec<u8>>, u64> = BTreeMap::new();
        for r in runs {
            *m.entry(r.clone()).or_default() += 1;
        }
        m
    };
    let (a, b) = (count(&real_runs), count(&ideal_runs));
    let keys: BTreeSet<&Option<Vec<u8>>> = a.keys().chain(b.keys()).collect();
    let n = trials as f64;
    let (mut tv, mut sigma) = (0.0, 0.0);
    for k in keys {
        let p = a.get(k).copied().unwrap_or(0) as f64 / n;
        let q = b.get(k).copied().unwrap_or(0) as f64 / n;
        tv += (p - q).abs() / 2.0;
        sigma += (p * (1.0 - p) / n + q * (1.0 - q) / n).sqrt() / 2.0;
    }
    let acc = |runs: &[Option<Vec<u8>>]| runs.iter().filter(|r| r.is_some()).count() as u64;
    Ok(GameReport { trials, real_accept: wilson(acc(&real_runs), trials), ideal_accept: wilson(acc(&ideal_runs), trials), advantage: tv, sigma })
}

/// How compiled rounds are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundBackend {
    /// Test rounds use exact reject probabilities from the analysis module;
    /// a computation round touched by an X or Y on a computation vertex
    /// returns the complement of the reference output.
    Predicate,
    /// Every round is a blind session.
    Blind,
}

/// Deviation of the server on each round of a compiled run.
#[derive(Clone, Debug, PartialEq)]
pub enum CompiledAdversary {
    Honest,
    /// Fixed deviations on the listed rounds, identity elsewhere.
    Rounds(BTreeMap<usize, PauliDeviation>),
    /// Independent per-round noise.
    Noisy { p_delta: f64, benign: Vec<PauliDeviation> },
}

impl CompiledAdversary {
    fn round<R: RngCore>(&self, j: usize, rng: &mut R) -> PauliDeviation {
        match self {
            CompiledAdversary::Honest => PauliDeviation::identity(),
            CompiledAdversary::Rounds(m) => m.get(&j).cloned().unwrap_or_default(),
            CompiledAdversary::Noisy { p_delta, benign } => Adversary::Noisy { p_delta: *p_delta, benign: benign.clone() }.draw(rng),
        }
    }
}

/// A compiled scheme with the computation run on its computation rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledSetup {
    pub compiled: CompiledScheme,
    pub computation: Option<GridComputation>,
    /// Artificial probability that a computation round returns a wrong answer.
    pub flip: f64,
    pub backend: RoundBackend,
    pub frame: DeviationFrame,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledResult {
    pub verdict: Verdict,
    pub failed_tests: usize,
    /// Majority over computation rounds; `None` on a tie or with no computation.
    pub decoded: Option<Vec<u8>>,
}

pub fn run_compiled<R: RngCore>(setup: &CompiledSetup, adversary: &CompiledAdversary, reference: Option<&Vec<u8>>, rng: &mut R) -> Result<CompiledResult, HarnessError> {
    let c = &setup.compiled;
    let plan = c.sample(rng);
    let mut failed = 0;
    let mut outputs = Vec::new();
    for j in 0..c.params.n {
        let dev = adversary.round(j, rng);
        // Parallel mode: a round whose canvas has no checks is a computation round.
        let canvas = match c.mode {
            CompilerMode::Parallel => {
                let i = c.base.sample(rng);
                (!c.base.canvases[i].checks.is_empty()).then_some(i)
            }
            _ => plan.canvas[j],
        };
        match canvas {
            Some(i) => {
                if test_fails(setup, i, &dev, rng)? {
                    failed += 1;
                }
            }
            None => {
                if let Some(comp) = &setup.computation {
                    let mut out = computation_round(setup, comp, &dev, reference, rng)?;
                    if setup.flip > 0.0 && rng.gen_bool(setup.flip) {
                        out.iter_mut().for_each(|b| *b ^= 1);
                    }
                    outputs.push(out);
                }
            }
        }
    }
    let verdict = if c.accepts(failed) { Verdict::Acc } else { Verdict::Rej };
    Ok(CompiledResult { verdict, failed_tests: failed, decoded: majority_vote(&outputs) })
}

fn test_fails<R: RngCore>(setup: &CompiledSetup, i: usize, dev: &PauliDeviation, rng: &mut R) -> Result<bool, HarnessError> {
    let base = &setup.compiled.base;
    match setup.backend {
        RoundBackend::Predicate => {
            let p = analysis::reject_probability(&base.graph, &base.canvases[i], dev)?;
            Ok(if p.is_zero() {
                false
            } else if p.is_one() {
                true
            } else {
                rng.gen_bool(rational::to_f64(&p))
            })
        }
        RoundBackend::Blind => {
            let mut tp = instantiate_canvas(&base.graph, &base.canvases[i])?;
            tp.randomise_free(rng);
            Ok(run_instance(&tp, dev, setup.frame, rng)?.0 == Verdict::Rej)
        }
    }
}

fn computation_round<R: RngCore>(
    setup: &CompiledSetup,
    comp: &GridComputation,
    dev: &PauliDeviation,
    reference: Option<&Vec<u8>>,
    rng: &mut R,
) -> Result<Vec<u8>, HarnessError> {
    match setup.backend {
        RoundBackend::Predicate => {
            let reference = reference.ok_or(HarnessError::BadSetup("predicate backend needs a reference output"))?;
            let harmful = dev.iter().any(|(v, p)| p.has_x() && comp.pattern.angles.contains_key(&v));
            Ok(reference.iter().map(|b| b ^ harmful as u8).collect())
        }
        RoundBackend::Blind => {
            let tp = TrappifiedPattern {
                pattern: comp.pattern.clone(),
                preparation: comp.input.clone(),
                trap: BTreeSet::new(),
                checks: Vec::new(),
                free: BTreeSet::new(),
                computation: comp.pattern.graph.vertices().iter().copied().collect(),
                classical_outputs: comp.classical_outputs.clone(),
            };
            let (_, outcomes) = run_instance(&tp, dev, setup.frame, rng)?;
            Ok(comp.classical_outputs.iter().map(|v| outcomes[v]).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledReport {
    pub trials: u64,
    pub accept: Interval,
    pub reject: Interval,
    /// Decoded answer differs from the reference (ties count as failures).
    pub wrong_decode: Interval,
    /// Accepted and decoded wrongly.
    pub wrong_accept: Interval,
}

pub fn estimate_compiled(setup: &CompiledSetup, adversary: &CompiledAdversary, trials: u64, seed: u64, jobs: usize) -> Result<CompiledReport, HarnessError> {
    let reference = match &setup.computation {
        Some(comp) => {
            let support = reference_outputs(comp)?;
            if support.len() != 1 && setup.backend == RoundBackend::Predicate {
                return Err(HarnessError::BadSetup("predicate backend needs a deterministic computation"));
            }
            support.into_iter().next()
        }
        None => None,
    };
    let results = run_trials(trials, seed, jobs, |_, rng| run_compiled(setup, adversary, reference.as_ref(), rng))?;
    let accepts = results.iter().filter(|r| r.verdict == Verdict::Acc).count() as u64;
    let wrong = |r: &CompiledResult| reference.is_some() && r.decoded.as_ref() != reference.as_ref();
    let wrong_decode = results.iter().filter(|r| wrong(r)).count() as u64;
    let wrong_accept = results.iter().filter(|r| r.verdict == Verdict::Acc && wrong(r)).count() as u64;
    Ok(CompiledReport {
        trials,
        accept: wilson(accepts, trials),
        reject: wilson(trials - accepts, trials),
        wrong_decode: wilson(wrong_decode, trials),
        wrong_accept: wilson(wrong_accept, trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use trapkit_core::{Angle, OpenGraph, Pauli};

    fn grid_protocol(cols: Vec<Option<usize>>) -> Protocol {
        let layout = GridLayout { rows: 4, cols: 3, cylindrical: false };
        Protocol::grid(layout, cols, GridComputation::line(&[Angle::ZERO; 3])).unwrap()
    }

    #[test]
    fn wilson_known_values() {
        let i = wilson(50, 100);
        assert!((i.lo - 0.4038).abs() < 1e-3 && (i.hi - 0.5962).abs() < 1e-3);
        let z = wilson(0, 100);
        assert_eq!(z.lo, 0.0);
        assert!(z.hi > 0.03 && z.hi < 0.04);
    }

    #[test]
    fn honest_grid_session_accepts_with_correct_output() {
        let p = grid_protocol(vec![Some(0)]);
        for t in 0..20 {
            let r = run_protocol3(&p, None, &Adversary::Honest, &mut trial_rng(1, t)).unwrap();
            assert_eq!((r.verdict, r.output), (Verdict::Acc, Some(vec![0])));
        }
    }

    #[test]
    fn x_on_trap_centre_always_rejects() {
        let p = grid_protocol(vec![Some(0)]);
        let adv = Adversary::Fixed(PauliDeviation::single(4, Pauli::X));
        for t in 0..20 {
            let r = run_protocol3(&p, None, &adv, &mut trial_rng(2, t)).unwrap();
            assert_eq!((r.verdict, r.output), (Verdict::Rej, None));
        }
    }

    #[test]
    fn verdicts_do_not_depend_on_the_computation() {
        let p = grid_protocol(vec![Some(0), None]);
        let other = GridComputation::line(&[Angle::new(2), Angle::new(4), Angle::new(6)]);
        let adv = Adversary::Distribution(vec![
            (PauliDeviation::single(4, Pauli::Y), rational::ratio(1, 2)),
            (PauliDeviation::single(10, Pauli::X), rational::ratio(1, 2)),
        ]);
        for t in 0..40 {
            let a = run_protocol3(&p, None, &adv, &mut trial_rng(3, t)).unwrap();
            let b = run_protocol3(&p, Some(&other), &adv, &mut trial_rng(3, t)).unwrap();
            assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn trials_are_schedule_independent() {
        let scheme = TrappifiedScheme::standard_uniform(&OpenGraph::cycle(5), &[[0, 2].into(), [1, 3].into(), [4].into()]).unwrap();
        let p = Protocol::trap_only(scheme);
        let adv = Adversary::Fixed(PauliDeviation::single(4, Pauli::X));
        let (a, ra) = estimate_rates(&p, &adv, 200, 9, 1).unwrap();
        let (b, rb) = estimate_rates(&p, &adv, 200, 9, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }
}
