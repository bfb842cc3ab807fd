//! Amplified, majority-vote and parallel-repetition compilers, and the
//! closed-form bounds that go with them.
//!
//! Compiled schemes are never materialised. A sample is a test-position set
//! plus one canvas draw per test round; the round graph is the base graph
//! repeated `n` times with no edges between rounds.

// Negated comparisons below are deliberate: NaN inputs must be inadmissible.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;
use thiserror::Error;

use crate::rational::Rational;
use crate::traps::{compose_schemes, TrapError, TrappifiedCanvas, TrappifiedScheme};

/// Largest population handled by the exact tail calculators.
pub const MAX_EXACT_TAIL: u64 = 10_000;
/// Grid resolution of the χ search before golden-section refinement.
pub const CHI_GRID: usize = 10_000;
const GOLDEN_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompilerError {
    #[error("bad parameters: {0}")]
    BadParams(&'static str),
    #[error("inadmissible: {0}")]
    Inadmissible(Inequality),
    #[error("exact tail needs population {actual} but the cap is {limit}")]
    CapExceeded { limit: u64, actual: u64 },
    #[error(transparent)]
    Trap(#[from] TrapError),
}

/// The threshold inequality that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inequality {
    /// `w/(s(1−ε)) < k_ε/n`
    EpsilonThreshold,
    /// `k_ε ≤ k_ν`
    EpsilonBelowNu,
    /// `k_ν/n < (1−2c)/(2−2c)`
    NuThreshold,
    /// `p_δ < k_δ/n`
    NoiseBelowDelta,
    /// `k_δ/n < w/(sδ)`
    DeltaThreshold,
    /// `k_δ ≤ k_ν`
    DeltaBelowNu,
    /// `k_ε(1−ε) > w`
    ParallelEpsilon,
    /// `k_δ·δ < w`
    ParallelDelta,
    /// `(n−k_ν)(1−ν) > f`
    ParallelNu,
}

impl Inequality {
    pub fn formula(self) -> &'static str {
        match self {
            Inequality::EpsilonThreshold => "w/(s(1-eps)) < k_eps/n",
            Inequality::EpsilonBelowNu => "k_eps <= k_nu",
            Inequality::NuThreshold => "k_nu/n < (1-2c)/(2-2c)",
            Inequality::NoiseBelowDelta => "p_delta < k_delta/n",
            Inequality::DeltaThreshold => "k_delta/n < w/(s*delta)",
            Inequality::DeltaBelowNu => "k_delta <= k_nu",
            Inequality::ParallelEpsilon => "k_eps(1-eps) > w",
            Inequality::ParallelDelta => "k_delta*delta < w",
            Inequality::ParallelNu => "(n-k_nu)(1-nu) > f",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.formula())
    }
}

/// `n = d + s` rounds, reject iff at least `w` tests fail, BQP error `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompilerParams {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub w: usize,
    pub c: f64,
}

impl CompilerParams {
    pub fn new(d: usize, s: usize, w: usize, c: f64) -> Result<CompilerParams, CompilerError> {
        let p = CompilerParams { n: d + s, d, s, w, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CompilerError> {
        if self.n != self.d + self.s {
            return Err(CompilerError::BadParams("n must equal d + s"));
        }
        if self.w == 0 {
            return Err(CompilerError::BadParams("w = 0 rejects every run"));
        }
        if self.w > self.s {
            return Err(CompilerError::BadParams("w must not exceed s"));
        }
        if !(0.0..0.5).contains(&self.c) {
            return Err(CompilerError::BadParams("c must lie in [0, 1/2)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompilerMode {
    /// Separate test and computation rounds.
    Amplified,
    /// As `Amplified`, decoding by bitwise majority over computation rounds.
    Bqp,
    /// Every round draws a canvas that also carries the computation.
    Parallel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledScheme {
    pub base: TrappifiedScheme,
    pub params: CompilerParams,
    pub mode: CompilerMode,
}

/// One draw from a compiled scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundPlan {
    /// `is_test[j]` for every round `j`.
    pub is_test: Vec<bool>,
    /// Canvas index per round; `None` on pure computation rounds.
    pub canvas: Vec<Option<usize>>,
}

impl RoundPlan {
    pub fn test_rounds(&self) -> impl Iterator<Item = usize> + '_ {
        self.is_test.iter().enumerate().filter(|(_, &t)| t).map(|(j, _)| j)
    }

    pub fn computation_rounds(&self) -> impl Iterator<Item = usize> + '_ {
        self.is_test.iter().enumerate().filter(|(_, &t)| !t).map(|(j, _)| j)
    }
}

pub fn compile_amplified(base: TrappifiedScheme, params: CompilerParams) -> Result<CompiledScheme, CompilerError> {
    params.validate()?;
    Ok(CompiledScheme { base, params, mode: CompilerMode::Amplified })
}

pub fn compile_bqp(base: TrappifiedScheme, params: CompilerParams) -> Result<CompiledScheme, CompilerError> {
    params.validate()?;
    if params.d == 0 {
        return Err(CompilerError::BadParams("majority vote needs at least one computation round"));
    }
    Ok(CompiledScheme { base, params, mode: CompilerMode::Bqp })
}

/// `n` independent draws from `base`, rejecting iff at least `w` rounds fail.
pub fn compile_parallel(base: TrappifiedScheme, n: usize, w: usize) -> Result<CompiledScheme, CompilerError> {
    if n == 0 || w == 0 || w > n {
        return Err(CompilerError::BadParams("parallel repetition needs 1 <= w <= n"));
    }
    Ok(CompiledScheme { base, params: CompilerParams { n, d: 0, s: n, w, c: 0.0 }, mode: CompilerMode::Parallel })
}

impl CompiledScheme {
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> RoundPlan {
        let CompilerParams { n, s, .. } = self.params;
        let mut is_test = alloc::vec![false; n];
        for j in rand::seq::index::sample(rng, n, s) {
            is_test[j] = true;
        }
        let canvas = is_test.iter().map(|&t| t.then(|| self.base.sample(rng))).collect();
        RoundPlan { is_test, canvas }
    }

    /// Accept iff fewer than `w` tests failed.
    pub fn accepts(&self, failed_tests: usize) -> bool {
        failed_tests < self.params.w
    }

    /// Number of canvases in the support, `C(n, s) · |P|^s`.
    pub fn canvas_count(&self) -> BigInt {
        let CompilerParams { n, s, .. } = self.params;
        binomial(n as u64, s as u64) * num_traits::pow(BigInt::from(self.base.canvases.len()), s)
    }

    pub fn canvas(&self, index: usize) -> &TrappifiedCanvas {
        &self.base.canvases[index]
    }
}

/// Bitwise majority; `None` when any bit is tied or there is nothing to vote on.
pub fn majority_vote(outputs: &[Vec<u8>]) -> Option<Vec<u8>> {
    let width = outputs.first()?.len();
    if outputs.iter().any(|o| o.len() != width) {
        return None;
    }
    (0..width)
        .map(|i| {
            let ones = outputs.iter().filter(|o| o[i] & 1 == 1).count();
            match (2 * ones).cmp(&outputs.len()) {
                core::cmp::Ordering::Greater => Some(1),
                core::cmp::Ordering::Less => Some(0),
                core::cmp::Ordering::Equal => None,
            }
        })
        .collect()
}

/// Pure computation rounds (weight `d/n`) mixed with test rounds (weight `s/n`).
pub fn mixture_scheme(test: &TrappifiedScheme, d: usize, s: usize) -> Result<TrappifiedScheme, CompilerError> {
    let n = (d + s) as i64;
    if d == 0 || s == 0 {
        return Err(CompilerError::BadParams("mixture needs both computation and test rounds"));
    }
    let computation = TrappifiedScheme::new(test.graph.clone(), alloc::vec![TrappifiedCanvas::empty()], alloc::vec![Rational::one()])?;
    Ok(compose_schemes(&[(crate::rational::ratio(d as i64, n), computation), (crate::rational::ratio(s as i64, n), test.clone())])?)
}

/// Parameters of the mixture: `ε_M = 1 − (1−ε)s/n`, `δ_M = sδ/n`, `ν_M = 1 − (1−c)d/n`.
pub fn mixture_parameters(epsilon: &Rational, delta: &Rational, c: &Rational, d: usize, s: usize) -> (Rational, Rational, Rational) {
    let n = Rational::from_integer(BigInt::from(d + s));
    let (d, s) = (Rational::from_integer(BigInt::from(d)), Rational::from_integer(BigInt::from(s)));
    let one = Rational::one();
    (&one - (&one - epsilon) * &s / &n, &s * delta / &n, &one - (&one - c) * d / n)
}

/// Inputs to the amplification bounds. Thresholds are round counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    pub epsilon: f64,
    pub delta: f64,
    pub nu: f64,
    pub k_epsilon: f64,
    pub k_delta: f64,
    pub k_nu: f64,
    pub p_delta: f64,
}

/// A bound and the χ attaining it (`None` when no minimisation was needed).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub chi: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplifiedBounds {
    pub epsilon: Bound,
    pub delta: Bound,
    /// Majority-vote correctness, with the squared term `A(1−c) − 1/2`.
    pub nu: Bound,
    /// The same with `2A(1−c) − 1/2`, as displayed at the end of the usual derivation.
    pub nu_alt: Bound,
    pub p_delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParallelBounds {
    pub epsilon: f64,
    pub delta: f64,
    pub nu: f64,
}

fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Minimises `f` on `[lo, hi]` by grid search then golden-section refinement.
pub fn minimise(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    if hi <= lo {
        return (f(lo), lo);
    }
    let step = (hi - lo) / CHI_GRID as f64;
    let at = |i: usize| if i == CHI_GRID { hi } else { lo + step * i as f64 };
    let (mut best_i, mut best) = (0, f(lo));
    for i in 1..=CHI_GRID {
        let v = f(at(i));
        if v < best {
            (best_i, best) = (i, v);
        }
    }
    let (mut a, mut b) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(CHI_GRID)));
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > GOLDEN_RTOL * (libm::fabs(a) + libm::fabs(b)).max(f64::MIN_POSITIVE) {
        if f1 < f2 {
            (b, x2, f2) = (x2, x1, f1);
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            (a, x1, f1) = (x1, x2, f2);
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let x = (a + b) / 2.0;
    let v = f(x);
    if v < best {
        (v, x)
    } else {
        (best, at(best_i))
    }
}

/// Undetected probability of a weight-`≥ k_ε` deviation after compilation.
pub fn epsilon_prime(epsilon: f64, k_epsilon: f64, n: usize, s: usize, w: usize) -> Result<Bound, CompilerError> {
    let (n, s, w) = (n as f64, s as f64, w as f64);
    let hi = k_epsilon / n - w / (s * (1.0 - epsilon));
    if !(hi > 0.0) {
        return Err(CompilerError::Inadmissible(Inequality::EpsilonThreshold));
    }
    let f = |chi: f64| {
        let a = k_epsilon / n - chi;
        exp(-2.0 * chi * chi * s) + exp(-2.0 * (a * (1.0 - epsilon) - w / s).powi(2) / a * s)
    };
    let (value, chi) = minimise(f, 0.0, hi);
    Ok(Bound { value, chi: Some(chi) })
}

/// Reject probability of a weight-`< k_δ` benign deviation after compilation.
/// A base that never rejects (`δ = 0`) never rejects after compilation either.
pub fn delta_prime(delta: f64, k_delta: f64, n: usize, s: usize, w: usize) -> Result<Bound, CompilerError> {
    if delta == 0.0 {
        return Ok(Bound { value: 0.0, chi: None });
    }
    let (n, s, w) = (n as f64, s as f64, w as f64);
    let hi = w / (s * delta) - k_delta / n;
    if !(hi > 0.0) {
        return Err(CompilerError::Inadmissible(Inequality::DeltaThreshold));
    }
    let f = |chi: f64| {
        let a = k_delta / n + chi;
        exp(-2.0 * chi * chi * s) + exp(-2.0 * (a * delta - w / s).powi(2) / a * s)
    };
    let (value, chi) = minimise(f, 0.0, hi);
    Ok(Bound { value, chi: Some(chi) })
}

fn nu_bound(c: f64, k_nu: f64, n: usize, d: usize, doubled: bool) -> Result<Bound, CompilerError> {
    if d == 0 {
        return Err(CompilerError::BadParams("majority vote needs at least one computation round"));
    }
    let (n, d) = (n as f64, d as f64);
    let hi = (1.0 - 2.0 * c) / (2.0 - 2.0 * c) - k_nu / n;
    if !(hi > 0.0) {
        return Err(CompilerError::Inadmissible(Inequality::NuThreshold));
    }
    let lead = if doubled { 2.0 } else { 1.0 };
    let f = |chi: f64| {
        let a = 1.0 - k_nu / n - chi;
        exp(-2.0 * chi * chi * d) + exp(-2.0 * (lead * a * (1.0 - c) - 0.5).powi(2) / a * d)
    };
    let (value, chi) = minimise(f, 0.0, hi);
    Ok(Bound { value, chi: Some(chi) })
}

/// Majority-vote failure probability with at most `k_ν` harmful rounds.
pub fn nu_prime(c: f64, k_nu: f64, n: usize, d: usize) -> Result<Bound, CompilerError> {
    nu_bound(c, k_nu, n, d, false)
}

pub fn nu_prime_alt(c: f64, k_nu: f64, n: usize, d: usize) -> Result<Bound, CompilerError> {
    nu_bound(c, k_nu, n, d, true)
}

/// Probability that independent per-round noise at rate `p_δ` touches at least `k_δ` rounds.
pub fn p_delta_prime(p_delta: f64, k_delta: f64, n: usize) -> Result<f64, CompilerError> {
    let n = n as f64;
    if !(p_delta < k_delta / n) {
        return Err(CompilerError::Inadmissible(Inequality::NoiseBelowDelta));
    }
    Ok(exp(-2.0 * (p_delta - k_delta / n).powi(2) * n))
}

/// Checks every threshold inequality of the combined statement.
pub fn check_admissible(b: &BoundInputs, p: &CompilerParams) -> Result<(), CompilerError> {
    let (n, s, w) = (p.n as f64, p.s as f64, p.w as f64);
    let checks = [
        (w / (s * (1.0 - b.epsilon)) < b.k_epsilon / n, Inequality::EpsilonThreshold),
        (b.k_epsilon <= b.k_nu, Inequality::EpsilonBelowNu),
        (b.k_nu / n < (1.0 - 2.0 * p.c) / (2.0 - 2.0 * p.c), Inequality::NuThreshold),
        (b.p_delta < b.k_delta / n, Inequality::NoiseBelowDelta),
        (b.delta == 0.0 || b.k_delta / n < w / (s * b.delta), Inequality::DeltaThreshold),
        (b.k_delta <= b.k_nu, Inequality::DeltaBelowNu),
    ];
    match checks.iter().find(|(ok, _)| !ok) {
        Some(&(_, which)) => Err(CompilerError::Inadmissible(which)),
        None => Ok(()),
    }
}

pub fn bounds_amplified(b: &BoundInputs, p: &CompilerParams) -> Result<AmplifiedBounds, CompilerError> {
    p.validate()?;
    check_admissible(b, p)?;
    Ok(AmplifiedBounds {
        epsilon: epsilon_prime(b.epsilon, b.k_epsilon, p.n, p.s, p.w)?,
        delta: delta_prime(b.delta, b.k_delta, p.n, p.s, p.w)?,
        nu: nu_prime(p.c, b.k_nu, p.n, p.d)?,
        nu_alt: nu_prime_alt(p.c, b.k_nu, p.n, p.d)?,
        p_delta: p_delta_prime(b.p_delta, b.k_delta, p.n)?,
    })
}

pub fn epsilon_parallel(epsilon: f64, k_epsilon: f64, w: usize) -> Result<f64, CompilerError> {
    let m = k_epsilon * (1.0 - epsilon) - w as f64;
    if !(m > 0.0) {
        return Err(CompilerError::Inadmissible(Inequality::ParallelEpsilon));
    }
    Ok(exp(-2.0 * m * m / k_epsilon))
}

pub fn delta_parallel(delta: f64, k_delta: f64, w: usize) -> Result<f64, CompilerError> {
    let m = w as f64 - k_delta * delta;
    if !(m > 0.0) {
        return Err(CompilerError::Inadmissible(Inequality::ParallelDelta));
    }
    if k_delta == 0.0 {
        return Ok(0.0);
    }
    Ok(exp(-2.0 * m * m / k_delta))
}

/// Decoder succeeds with more than `f` correct rounds out of `n`.
pub fn nu_parallel(nu: f64, k_nu: f64, n: usize, f: f64) -> Result<f64, CompilerError> {
    let good = n as f64 - k_nu;
    let m = good * (1.0 - nu) - f;
    if !(m > 0.0) {
        return Err(CompilerError::Inadmissible(Inequality::ParallelNu));
    }
    Ok(exp(-2.0 * m * m / good))
}

pub fn bounds_parallel(b: &BoundInputs, n: usize, w: usize, f: f64) -> Result<ParallelBounds, CompilerError> {
    if n == 0 || w == 0 || w > n {
        return Err(CompilerError::BadParams("parallel repetition needs 1 <= w <= n"));
    }
    Ok(ParallelBounds {
        epsilon: epsilon_parallel(b.epsilon, b.k_epsilon, w)?,
        delta: delta_parallel(b.delta, b.k_delta, w)?,
        nu: nu_parallel(b.nu, b.k_nu, n, f)?,
    })
}

/// `P[X ≤ (K/N − χ)·draws] ≤ exp(−2χ²·draws)` for a hypergeometric `X`.
pub fn hoeffding_hypergeometric(chi: f64, draws: usize) -> f64 {
    exp(-2.0 * chi * chi * draws as f64)
}

/// `P[Y < w] ≤ exp(−2(mp − w)²/m)` for `Y ~ Bin(m, p)` with `mp > w`.
pub fn hoeffding_binomial_below(m: usize, p: f64, w: f64) -> f64 {
    let mf = m as f64;
    exp(-2.0 * (mf * p - w).powi(2) / mf)
}

/// `P[Y ≥ w] ≤ exp(−2(w − mp)²/m)` for `Y ~ Bin(m, p)` with `mp < w`.
pub fn hoeffding_binomial_at_least(m: usize, p: f64, w: f64) -> f64 {
    hoeffding_binomial_below(m, p, w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// `draws` without replacement from `population` items of which `successes` are marked.
    Hypergeometric { population: u64, successes: u64, draws: u64 },
    Binomial { trials: u64, p: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    AtMost(u64),
    AtLeast(u64),
}

impl Tail {
    fn holds(self, k: u64) -> bool {
        match self {
            Tail::AtMost(x) => k <= x,
            Tail::AtLeast(x) => k >= x,
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact tail mass.
pub fn tail_exact(kind: &TailKind, tail: Tail) -> Result<Rational, CompilerError> {
    match kind {
        TailKind::Hypergeometric { population, successes, draws } => {
            let (nn, kk, dd) = (*population, *successes, *draws);
            if nn > MAX_EXACT_TAIL {
                return Err(CompilerError::CapExceeded { limit: MAX_EXACT_TAIL, actual: nn });
            }
            if kk > nn || dd > nn {
                return Err(CompilerError::BadParams("hypergeometric counts exceed the population"));
            }
            let lo = dd.saturating_sub(nn - kk);
            let hi = dd.min(kk);
            // a = C(K, k), b = C(N−K, d−k), updated in place as k grows.
            let mut a = binomial(kk, lo);
            let mut b = binomial(nn - kk, dd - lo);
            let mut num = BigInt::zero();
            for k in lo..=hi {
                if tail.holds(k) {
                    num += &a * &b;
                }
                if k < hi {
                    a = a * BigInt::from(kk - k) / BigInt::from(k + 1);
                    let j = dd - k;
                    b = b * BigInt::from(j) / BigInt::from(nn - kk - j + 1);
                }
            }
            Ok(Rational::new(num, binomial(nn, dd)))
        }
        TailKind::Binomial { trials, p } => {
            let m = *trials;
            if m > MAX_EXACT_TAIL {
                return Err(CompilerError::CapExceeded { limit: MAX_EXACT_TAIL, actual: m });
            }
            if p.is_negative() || *p > Rational::one() {
                return Err(CompilerError::BadParams("probability outside [0, 1]"));
            }
            let (a, b) = (p.numer().clone(), p.denom().clone());
            let q = &b - &a;
            let mut num = BigInt::zero();
            let mut coef = BigInt::one();
            for k in 0..=m {
                if tail.holds(k) {
                    num += &coef * num_traits::pow(a.clone(), k as usize) * num_traits::pow(q.clone(), (m - k) as usize);
                }
                coef = coef * BigInt::from(m - k) / BigInt::from(k + 1);
            }
            Ok(Rational::new(num, num_traits::pow(b, m as usize)))
        }
    }
}

/// Tail mass as a float, for comparisons against Hoeffding terms.
pub fn tail_f64(kind: &TailKind, tail: Tail) -> Result<f64, CompilerError> {
    let r = tail_exact(kind, tail)?;
    Ok(r.to_f64().unwrap_or_else(|| crate::rational::to_f64(&r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OpenGraph;
    use crate::rational::ratio;
    use crate::traps::build_standard_trap;
    use rand::SeedableRng;

    fn pentagon() -> TrappifiedScheme {
        let g = OpenGraph::cycle(5);
        let sets: Vec<_> = [[0, 2], [1, 3], [2, 4], [3, 0], [4, 1]].iter().map(|p| p.iter().copied().collect()).collect();
        TrappifiedScheme::new(
            g.clone(),
            sets.iter().map(|h| build_standard_trap(&g, h).unwrap()).collect(),
            alloc::vec![ratio(1, 5); 5],
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert_eq!(CompilerParams::new(1, 1, 0, 0.0), Err(CompilerError::BadParams("w = 0 rejects every run")));
        assert!(CompilerParams::new(1, 1, 2, 0.0).is_err());
        assert!(CompilerParams::new(1, 1, 1, 0.5).is_err());
    }

    #[test]
    fn smallest_instance_splits_evenly() {
        let c = compile_amplified(pentagon(), CompilerParams::new(1, 1, 1, 0.0).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let first = (0..4000).filter(|_| c.sample(&mut rng).is_test[0]).count();
        assert!((1800..2200).contains(&first));
        let plan = c.sample(&mut rng);
        assert_eq!(plan.test_rounds().count(), 1);
        assert_eq!(plan.canvas.iter().flatten().count(), 1);
    }

    #[test]
    fn canvas_count_is_combinatorial() {
        let c = compile_amplified(pentagon(), CompilerParams::new(5, 5, 1, 0.0).unwrap()).unwrap();
        assert_eq!(c.canvas_count(), BigInt::from(787_500));
    }

    #[test]
    fn majority_vote_cases() {
        let good = alloc::vec![1u8, 0, 1];
        let bad = alloc::vec![0u8, 1, 1];
        assert_eq!(majority_vote(&[good.clone(), bad.clone(), good.clone()]), Some(good.clone()));
        assert_eq!(majority_vote(&[good.clone(), bad]), None);
        assert_eq!(majority_vote(&[good.clone(), good.clone()]), Some(good));
        assert_eq!(majority_vote(&[]), None);
    }

    #[test]
    fn exact_tails() {
        let hg = TailKind::Hypergeometric { population: 10, successes: 5, draws: 5 };
        assert_eq!(tail_exact(&hg, Tail::AtMost(1)).unwrap(), ratio(26, 252));
        assert_eq!(tail_exact(&hg, Tail::AtLeast(0)).unwrap(), Rational::one());
        assert_eq!(tail_exact(&TailKind::Binomial { trials: 9, p: Rational::zero() }, Tail::AtLeast(1)).unwrap(), Rational::zero());
        assert_eq!(tail_exact(&TailKind::Binomial { trials: 4, p: ratio(1, 2) }, Tail::AtLeast(2)).unwrap(), ratio(11, 16));
        assert!(matches!(tail_exact(&TailKind::Binomial { trials: 10_001, p: ratio(1, 2) }, Tail::AtLeast(2)), Err(CompilerError::CapExceeded { .. })));
    }

    #[test]
    fn epsilon_prime_beats_fixed_chi() {
        let (n, s, w) = (1000, 500, 50);
        let b = epsilon_prime(0.5, 450.0, n, s, w).unwrap();
        let a: f64 = 0.45 - 0.2;
        let direct = libm::exp(-2.0 * 0.04 * 500.0) + libm::exp(-2.0 * (a * 0.5 - 0.1).powi(2) / a * 500.0);
        assert!(b.value <= direct);
        assert!(b.chi.unwrap() > 0.0 && b.chi.unwrap() < 0.45 - 0.2);
        // k_ε/n = w/(s(1−ε)) = 0.2 exactly.
        assert_eq!(epsilon_prime(0.5, 200.0, n, s, w), Err(CompilerError::Inadmissible(Inequality::EpsilonThreshold)));
    }

    #[test]
    fn delta_zero_base() {
        assert_eq!(delta_prime(0.0, 4.0, 40, 20, 2).unwrap(), Bound { value: 0.0, chi: None });
    }

    #[test]
    fn parallel_forms() {
        assert!((epsilon_parallel(0.5, 20.0, 5).unwrap() - libm::exp(-2.5)).abs() < 1e-15);
        assert_eq!(epsilon_parallel(0.5, 10.0, 5), Err(CompilerError::Inadmissible(Inequality::ParallelEpsilon)));
        let (n, d) = (20usize, 10usize);
        let v = nu_parallel(0.0, 0.0, n, d as f64 / 2.0).unwrap();
        assert!((v - libm::exp(-2.0 * (20.0f64 - 5.0).powi(2) / 20.0)).abs() < 1e-15);
    }

    #[test]
    fn admissibility_names_the_failure() {
        let p = CompilerParams::new(20, 20, 2, 0.0).unwrap();
        let b = BoundInputs { epsilon: 0.6, delta: 0.0, nu: 0.0, k_epsilon: 19.0, k_delta: 4.0, k_nu: 19.0, p_delta: 0.02 };
        assert!(bounds_amplified(&b, &p).is_ok());
        let low = BoundInputs { k_epsilon: 10.0, ..b };
        assert_eq!(bounds_amplified(&low, &p), Err(CompilerError::Inadmissible(Inequality::EpsilonThreshold)));
        let noisy = BoundInputs { p_delta: 0.2, ..b };
        assert_eq!(bounds_amplified(&noisy, &p), Err(CompilerError::Inadmissible(Inequality::NoiseBelowDelta)));
    }

    #[test]
    fn mixture_matches_composition() {
        let base = pentagon();
        let m = mixture_scheme(&base, 3, 2).unwrap();
        let eps = crate::analysis::scheme_epsilon(&m, &crate::analysis::DeviationSet::AllXY).unwrap().value;
        let (em, dm, nm) = mixture_parameters(&ratio(3, 5), &Rational::zero(), &ratio(1, 10), 3, 2);
        assert_eq!(eps, em);
        assert_eq!(em, ratio(21, 25));
        assert_eq!(dm, Rational::zero());
        assert_eq!(nm, ratio(23, 50));
    }
}
