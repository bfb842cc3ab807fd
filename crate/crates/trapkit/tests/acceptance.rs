//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so the
//! lines are printed even when everything passes.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trapkit::harness::{
    distinguishing_game, estimate_compiled, estimate_rates, run_protocol3, run_trials, Adversary, CompiledAdversary, CompiledSetup,
    Protocol, RoundBackend, Verdict,
};
use trapkit_core::analysis::{
    pattern_reject_probability, reject_probability, scheme_epsilon, scheme_reject_probability, simulate_reject_probability, DeviationSet,
};
use trapkit_core::compiler::{
    check_admissible, compile_amplified, delta_parallel, delta_prime, epsilon_parallel, epsilon_prime, hoeffding_binomial_at_least,
    hoeffding_binomial_below, hoeffding_hypergeometric, nu_parallel, nu_prime, nu_prime_alt, p_delta_prime, tail_exact, tail_f64,
    BoundInputs, CompilerParams, Tail, TailKind,
};
use trapkit_core::graph::catalogue::graphs_up_to_isomorphism;
use trapkit_core::graph::{chromatic_number, clique_number, fractional_chromatic_number, independent_sets, optimal_colouring};
use trapkit_core::mbqc::{run_pattern, Forced, MeasurementPattern};
use trapkit_core::optimizer::{build_relation, solve_distribution, standard_candidates, to_scheme};
use trapkit_core::rational::{ratio, to_f64};
use trapkit_core::state::{LocalState, QuantumState};
use trapkit_core::traps::{
    build_general_trap, build_standard_trap, embed_dummy_isolated, GridComputation, GridLayout, TrappifiedCanvas, TrappifiedScheme,
};
use trapkit_core::ubqc::twirl::{all_words, twirl_residual};
use trapkit_core::ubqc::{run_blind_session, ClientSecrets, DeviationFrame};
use trapkit_core::{Angle, OpenGraph, Pauli, PauliDeviation, PauliWord, Rational};

type Check = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const JOBS: usize = 4;

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn pentagon_scheme() -> TrappifiedScheme {
    TrappifiedScheme::standard_uniform(&OpenGraph::cycle(5), &[set(&[0, 2]), set(&[1, 3]), set(&[2, 4]), set(&[0, 3]), set(&[1, 4])]).unwrap()
}

fn detection(s: &TrappifiedScheme) -> Rational {
    Rational::one() - scheme_epsilon(s, &DeviationSet::AllXY).unwrap().value
}

fn c1_pentagon_optimum() -> Check {
    let g = OpenGraph::cycle(5);
    let rel = build_relation(&g, standard_candidates(&g).unwrap(), &DeviationSet::AllXY).unwrap();
    let dist = solve_distribution(&rel).unwrap();
    ensure!(dist.rate == ratio(2, 5), "LP rate {}", dist.rate);
    let support: BTreeSet<BTreeSet<usize>> =
        rel.tests.iter().zip(&dist.weights).filter(|(_, w)| !w.is_zero()).map(|(t, _)| t.h().unwrap().clone()).collect();
    let pairs: BTreeSet<BTreeSet<usize>> = independent_sets(&g, None).unwrap().into_iter().filter(|s| s.len() == 2).collect();
    ensure!(support == pairs, "support {support:?}");
    ensure!(detection(&to_scheme(&g, &rel, &dist).unwrap()) == ratio(2, 5), "optimal scheme does not evaluate to 2/5");
    let colouring = optimal_colouring(&g).unwrap();
    ensure!(colouring.len() == 3, "χ = {}", colouring.len());
    let baseline = detection(&TrappifiedScheme::standard_uniform(&g, &colouring).unwrap());
    ensure!(baseline == ratio(1, 3), "colouring baseline {baseline}");
    Ok(format!("rate 2/5 on the five 2-sets, 3-colouring baseline {baseline}"))
}

fn c2_fractional_sandwich() -> Check {
    let mut count = 0;
    for n in 1..=7 {
        for g in graphs_up_to_isomorphism(n, true) {
            count += 1;
            let rel = build_relation(&g, standard_candidates(&g).unwrap(), &DeviationSet::AllXY).unwrap();
            let rate = solve_distribution(&rel).unwrap().rate;
            let fc = fractional_chromatic_number(&g).unwrap();
            let omega_f: Rational = fc.clique.values().cloned().sum();
            let chi = Rational::from_integer(chromatic_number(&g).unwrap().into());
            let omega = Rational::from_integer(clique_number(&g).unwrap().into());
            ensure!(rate == fc.value.recip(), "{g:?}: rate {rate} vs 1/χ_f {}", fc.value.recip());
            ensure!(omega_f == fc.value, "{g:?}: ω_f {omega_f} ≠ χ_f {}", fc.value);
            ensure!(chi.recip() <= rate && rate <= omega.recip(), "{g:?}: sandwich fails");
        }
    }
    ensure!(count >= 850, "only {count} graphs");
    Ok(format!("{count} connected graphs, rate = 1/χ_f and 1/χ ≤ rate ≤ 1/ω on all"))
}

fn c3_general_traps() -> Check {
    let mut graphs = 0;
    for n in 1..=6usize {
        let half = 1u64 << (n - 1);
        let nonempty = (1u64 << n) - 1;
        for g in graphs_up_to_isomorphism(n, false) {
            graphs += 1;
            let subsets: Vec<BTreeSet<usize>> = (1..=nonempty).map(|m| g.mask_to_set(m)).collect();
            let canvases: Vec<TrappifiedCanvas> = subsets.iter().map(|h| build_general_trap(&g, h).unwrap()).collect();
            for m in 1..=nonempty {
                let dev = PauliDeviation::uniform(&g.mask_to_set(m), Pauli::X);
                let hits = canvases.iter().filter(|c| reject_probability(&g, c, &dev).unwrap().is_one()).count() as u64;
                ensure!(hits == half, "{g:?}: support {m:b} rejected by {hits} of {nonempty} subsets");
            }
            let uniform = TrappifiedScheme::uniform(g.clone(), canvases.clone()).unwrap();
            let rate = detection(&uniform);
            ensure!(rate == ratio(half as i64, nonempty as i64), "{g:?}: non-empty scheme rate {rate}");
            ensure!(rate >= ratio(1, 2), "{g:?}: does not 1/2-detect");
            let mut with_empty = canvases;
            with_empty.push(TrappifiedCanvas::empty());
            let full = detection(&TrappifiedScheme::uniform(g.clone(), with_empty).unwrap());
            ensure!(full == ratio(1, 2), "{g:?}: all-subsets scheme rate {full}");
        }
    }
    Ok(format!(
        "{graphs} graphs: every support hit by 2^(n-1) subsets; non-empty scheme detects 2^(n-1)/(2^n-1) ≥ 1/2, all-subsets scheme exactly 1/2"
    ))
}

fn random_density(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let d = 1 << n;
    let a: Vec<Complex64> = (0..d * d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                rho[i * d + j] += a[i * d + k] * a[j * d + k].conj();
            }
        }
    }
    let tr: f64 = (0..d).map(|i| rho[i * d + i].re).sum();
    rho.iter().map(|z| z / tr).collect()
}

fn c4_twirl() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let one = all_words(1);
    let mut pairs = 0;
    for q in &one {
        for q2 in &one {
            if q != q2 {
                pairs += 1;
                worst = worst.max(twirl_residual(&random_density(1, &mut rng), q, q2));
            }
        }
    }
    let two = all_words(2);
    for _ in 0..50 {
        let (a, b) = loop {
            let (a, b) = (rng.gen_range(0..16), rng.gen_range(0..16));
            if a != b {
                break (a, b);
            }
        };
        worst = worst.max(twirl_residual(&random_density(2, &mut rng), &two[a], &two[b]));
    }
    ensure!(worst < 1e-12, "residual {worst:e}");
    // Diagonal terms survive, so the check is not vacuous.
    let z = PauliWord::new(0, vec![Pauli::Z]);
    ensure!(twirl_residual(&random_density(1, &mut rng), &z, &z) > 0.1, "Q = Q' term vanished");
    Ok(format!("{pairs} one-qubit pairs and 50 two-qubit cases, max residual {worst:.1e}"))
}

fn c5_three_vertex_example() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 1.0;
    let mut sessions = 0;
    for k1 in 0..8 {
        for k2 in 0..8 {
            let p = MeasurementPattern::line(&[Angle::new(k1), Angle::new(k2)]);
            let input = {
                let mut s = QuantumState::product(&[(0, LocalState::PlusTheta(Angle::new(3)))].into_iter().collect()).unwrap();
                s.apply_h(0).unwrap();
                s
            };
            for raw in 0..4u8 {
                let forced = [(0, raw & 1), (1, raw >> 1)].into_iter().collect();
                let secrets = ClientSecrets::sample(&p.graph, p.graph.inputs(), &mut rng);
                let blind =
                    run_blind_session(&p, &input, secrets, &PauliDeviation::identity(), DeviationFrame::Measurement, Forced(forced)).unwrap();
                let plain = run_pattern(&p, &input, &mut Forced(blind.outcomes.clone()), &PauliDeviation::identity()).unwrap();
                worst = worst.min(blind.output.fidelity(&plain.output).unwrap());
                sessions += 1;
            }
        }
    }
    ensure!(worst > 1.0 - 1e-9, "fidelity {worst}");
    Ok(format!("{sessions} forced sessions, min fidelity {worst:.12}"))
}

fn c6_trap_predicates() -> Check {
    let mut canvases_checked = 0u64;
    let mut comparisons = 0u64;
    for n in 1..=6 {
        for g in graphs_up_to_isomorphism(n, false) {
            let vs = g.vertices().to_vec();
            let mut devs = Vec::new();
            for (i, &u) in vs.iter().enumerate() {
                for p in [Pauli::X, Pauli::Y] {
                    devs.push(PauliDeviation::single(u, p));
                    for &v in &vs[i + 1..] {
                        for q in [Pauli::X, Pauli::Y] {
                            devs.push([(u, p), (v, q)].into_iter().collect());
                        }
                    }
                }
            }
            let mut canvases = Vec::new();
            for m in 1u64..1 << n {
                let h = g.mask_to_set(m);
                canvases.push((h.clone(), true, build_general_trap(&g, &h).unwrap()));
                if g.is_independent(&h) {
                    canvases.push((h.clone(), false, build_standard_trap(&g, &h).unwrap()));
                }
            }
            for (h, general, c) in &canvases {
                canvases_checked += 1;
                ensure!(simulate_reject_probability(&g, c, &PauliDeviation::identity()).unwrap().is_zero(), "{g:?} {h:?}: honest reject");
                for d in &devs {
                    let m = d.xy_support();
                    let predicate = if *general { m.intersection(h).count() % 2 == 1 } else { !m.is_disjoint(h) };
                    let sim = simulate_reject_probability(&g, c, d).unwrap();
                    ensure!(sim == if predicate { Rational::one() } else { Rational::zero() }, "{g:?} H={h:?} {d}: simulated {sim}");
                    comparisons += 1;
                }
            }
        }
    }
    Ok(format!("{canvases_checked} canvases accept honestly; {comparisons} simulated reject bits equal the predicates"))
}

fn c7_trap_computation_independence() -> Check {
    // Exact route: Clifford computations, exact distributions.
    let layout = GridLayout { rows: 4, cols: 5, cylindrical: false };
    let comps = [
        GridComputation::line(&[Angle::new(2), Angle::ZERO, Angle::new(6)]),
        GridComputation::line(&[Angle::ZERO; 5]),
        GridComputation::line(&[Angle::new(4), Angle::new(2)]),
    ];
    let instances: Vec<_> = comps.iter().map(|c| embed_dummy_isolated(&layout, Some(1), c).unwrap()).collect();
    let mut exact = 0;
    for v in 0..layout.rows * layout.cols {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let d = PauliDeviation::single(v, p);
            let r: Vec<Rational> = instances.iter().map(|tp| pattern_reject_probability(tp, &d).unwrap()).collect();
            ensure!(r.iter().all(|x| *x == r[0]), "{d}: {r:?}");
            exact += 1;
        }
    }
    // Session route: blind runs with arbitrary angles and shared seeds give identical verdicts.
    let layout = GridLayout { rows: 4, cols: 4, cylindrical: false };
    let comps = [
        GridComputation::line(&[Angle::new(1), Angle::new(3), Angle::new(6)]),
        GridComputation::line(&[Angle::ZERO; 4]),
        GridComputation::line(&[Angle::new(7), Angle::new(5)]),
    ];
    let p = Protocol::grid(layout, vec![Some(0)], comps[0].clone()).unwrap();
    let mut sessions = 0;
    for v in 0..16 {
        for q in [Pauli::X, Pauli::Y, Pauli::Z] {
            let adv = Adversary::Fixed(PauliDeviation::single(v, q));
            let runs: Vec<Vec<Verdict>> = comps
                .iter()
                .map(|c| run_trials(16, 700 + v as u64, JOBS, |_, rng| run_protocol3(&p, Some(c), &adv, rng).map(|r| r.verdict)).unwrap())
                .collect();
            ensure!(runs.iter().all(|r| *r == runs[0]), "vertex {v} {q:?}: verdicts differ");
            sessions += 48;
        }
    }
    Ok(format!("{exact} weight-1 deviations exact-equal; {sessions} blind sessions verdict-identical"))
}

fn c8_amplification() -> Check {
    let (n, d, s, w) = (40, 20, 20, 2);
    let base = pentagon_scheme();
    let eps = to_f64(&scheme_epsilon(&base, &DeviationSet::AllXY).unwrap().value);
    let params = CompilerParams::new(d, s, w, 0.0).unwrap();
    let trials = 100_000;

    // (a) X on a trap vertex in every one of k_ε = n rounds.
    let k_eps = n;
    let bound = epsilon_prime(eps, k_eps as f64, n, s, w).map_err(|e| e.to_string())?;
    let setup = CompiledSetup {
        compiled: compile_amplified(base.clone(), params).unwrap(),
        computation: None,
        flip: 0.0,
        backend: RoundBackend::Predicate,
        frame: DeviationFrame::Measurement,
    };
    let attack = CompiledAdversary::Rounds((0..k_eps).map(|j| (j, PauliDeviation::single(0, Pauli::X))).collect());
    let r = estimate_compiled(&setup, &attack, trials, 8, JOBS).unwrap();
    ensure!(r.accept.lo <= bound.value, "undetected {:.5} (lo {:.5}) above ε′ {:.4}", r.accept.estimate, r.accept.lo, bound.value);
    let exact = tail_f64(&TailKind::Binomial { trials: s as u64, p: ratio(2, 5) }, Tail::AtMost(w as u64 - 1)).unwrap();

    // (b) honest-but-noisy: Z on one random vertex with probability p_δ per round.
    let p_delta = 0.02;
    let k_delta = 4.0;
    let delta = to_f64(&scheme_epsilon(&base, &DeviationSet::ZOnly).map(|e| Rational::one() - e.value).unwrap());
    let delta_max = to_f64(&trapkit_core::analysis::scheme_delta(&base, &DeviationSet::ZOnly).unwrap().value);
    let db = delta_prime(delta_max, k_delta, n, s, w).map_err(|e| e.to_string())?;
    let pb = p_delta_prime(p_delta, k_delta, n).map_err(|e| e.to_string())?;
    let noise = CompiledAdversary::Noisy { p_delta, benign: (0..5).map(|v| PauliDeviation::single(v, Pauli::Z)).collect() };
    let rn = estimate_compiled(&setup, &noise, trials, 9, JOBS).unwrap();
    ensure!(rn.reject.lo <= pb + db.value, "false reject {:.5} above p_δ′+δ′ {:.4}", rn.reject.estimate, pb + db.value);
    ensure!(delta == 0.0, "Z-only noise detected");
    Ok(format!(
        "undetected {:.2e} [{:.2e}, {:.2e}] ≤ ε′ {:.4} (exact {exact:.2e}); false reject {:.2e} ≤ p_δ′+δ′ {:.4}",
        r.accept.estimate,
        r.accept.lo,
        r.accept.hi,
        bound.value,
        rn.reject.estimate,
        pb + db.value
    ))
}

fn c9_majority_vote() -> Check {
    let (n, d, s, c) = (22, 11, 11, 0.2);
    let k_nu = 2;
    let trials = 100_000;
    let setup = CompiledSetup {
        compiled: compile_amplified(pentagon_scheme(), CompilerParams::new(d, s, s, c).unwrap()).unwrap(),
        computation: Some(GridComputation::line(&[Angle::new(2), Angle::ZERO, Angle::new(6)])),
        flip: c,
        backend: RoundBackend::Predicate,
        frame: DeviationFrame::Measurement,
    };
    let attack = CompiledAdversary::Rounds((0..k_nu).map(|j| (j, PauliDeviation::single(0, Pauli::X))).collect());
    let r = estimate_compiled(&setup, &attack, trials, 10, JOBS).unwrap();
    let nu = nu_prime(c, k_nu as f64, n, d).map_err(|e| e.to_string())?;
    let nu_alt = nu_prime_alt(c, k_nu as f64, n, d).map_err(|e| e.to_string())?;
    ensure!(r.wrong_decode.lo <= nu.value, "failure {:.5} above ν′ {:.4}", r.wrong_decode.estimate, nu.value);
    let honest = estimate_compiled(&setup, &CompiledAdversary::Honest, trials, 11, JOBS).unwrap();
    let exact = tail_f64(&TailKind::Binomial { trials: d as u64, p: ratio(1, 5) }, Tail::AtLeast(6)).unwrap();
    ensure!((honest.wrong_decode.estimate - exact).abs() <= 3.0 * honest.wrong_decode.sigma.max(1e-4), "honest failure off the exact value");
    Ok(format!(
        "k_ν={k_nu}: failure {:.4} ≤ ν′ {:.3} (ν′_alt {:.3}); honest {:.4} vs exact {exact:.4}",
        r.wrong_decode.estimate, nu.value, nu_alt.value, honest.wrong_decode.estimate
    ))
}

/// Random tuple satisfying every threshold inequality.
fn admissible_tuple(rng: &mut ChaCha8Rng) -> (BoundInputs, CompilerParams) {
    loop {
        let n = rng.gen_range(20..=300usize);
        let s = rng.gen_range(n / 4..=3 * n / 4).max(1);
        let d = n - s;
        if d == 0 {
            continue;
        }
        let c = rng.gen_range(0.0..0.3);
        let w = rng.gen_range(1..=(s / 4).max(1));
        let b = BoundInputs {
            epsilon: rng.gen_range(0.05..0.9),
            delta: rng.gen_range(0.01..0.5),
            nu: rng.gen_range(0.0..0.3),
            k_epsilon: rng.gen_range(1..=n) as f64,
            k_delta: rng.gen_range(1..=n) as f64,
            k_nu: rng.gen_range(1..=n) as f64,
            p_delta: rng.gen_range(0.0..0.2),
        };
        let p = CompilerParams::new(d, s, w, c).unwrap();
        if check_admissible(&b, &p).is_ok() {
            return (b, p);
        }
    }
}

/// `exact ≤ hoeffding ≤ formula`, all as exact-or-float numbers with a rounding allowance.
fn le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + 1e-9) + 1e-15
}

fn c10_tail_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut compared = 0;
    for t in 0..100 {
        let (b, p) = admissible_tuple(&mut rng);
        let (n, s, w, d) = (p.n as u64, p.s as u64, p.w as f64, p.d as u64);
        let rat = |x: f64| Rational::from_float(x).unwrap();
        let exact = |k: TailKind, tail: Tail| tail_exact(&k, tail).unwrap().to_f64().unwrap();

        // ε′: few attacked tests, then too few failures among them.
        let be = epsilon_prime(b.epsilon, b.k_epsilon, p.n, p.s, p.w).unwrap();
        let chi = be.chi.unwrap();
        let a = b.k_epsilon / n as f64 - chi;
        let h1 = hoeffding_hypergeometric(chi, s as usize);
        let e1 = exact(TailKind::Hypergeometric { population: n, successes: b.k_epsilon as u64, draws: s }, Tail::AtMost((a * s as f64).floor() as u64));
        let m = (a * s as f64).ceil() as u64;
        let h2 = hoeffding_binomial_below(m as usize, 1.0 - b.epsilon, w);
        let e2 = if w >= 1.0 { exact(TailKind::Binomial { trials: m, p: rat(1.0 - b.epsilon) }, Tail::AtMost(w as u64 - 1)) } else { 0.0 };
        let f2 = (-2.0 * (a * (1.0 - b.epsilon) - w / s as f64).powi(2) / a * s as f64).exp();
        ensure!(le(e1, h1) && le(e2, h2) && le(h2, f2), "tuple {t} ε′: {e1:.3e}≤{h1:.3e}, {e2:.3e}≤{h2:.3e}≤{f2:.3e}");

        // δ′: many benign-deviation tests, then too many spurious failures.
        let bd = delta_prime(b.delta, b.k_delta, p.n, p.s, p.w).unwrap();
        let chi = bd.chi.unwrap();
        let a = b.k_delta / n as f64 + chi;
        let h1 = hoeffding_hypergeometric(chi, s as usize);
        let e1 = exact(TailKind::Hypergeometric { population: n, successes: b.k_delta as u64, draws: s }, Tail::AtLeast((a * s as f64).ceil() as u64));
        let m = ((a * s as f64).floor() as u64).max(1);
        let h2 = hoeffding_binomial_at_least(m as usize, b.delta, w);
        let e2 = exact(TailKind::Binomial { trials: m, p: rat(b.delta) }, Tail::AtLeast(w.ceil() as u64));
        ensure!(le(e1, h1) && le(e2, h2), "tuple {t} δ′: {e1:.3e}≤{h1:.3e}, {e2:.3e}≤{h2:.3e}");

        // ν′: few clean computation rounds, then no clean majority.
        let bn = nu_prime(p.c, b.k_nu, p.n, p.d).unwrap();
        let chi = bn.chi.unwrap();
        let a = 1.0 - b.k_nu / n as f64 - chi;
        let clean = n - b.k_nu as u64;
        let h1 = hoeffding_hypergeometric(chi, d as usize);
        let e1 = exact(TailKind::Hypergeometric { population: n, successes: clean, draws: d }, Tail::AtMost((a * d as f64).floor() as u64));
        let m = (a * d as f64).ceil() as u64;
        if m as f64 * (1.0 - p.c) > d as f64 / 2.0 {
            let h2 = hoeffding_binomial_below(m as usize, 1.0 - p.c, d as f64 / 2.0);
            let e2 = exact(TailKind::Binomial { trials: m, p: rat(1.0 - p.c) }, Tail::AtMost(d / 2));
            ensure!(le(e2, h2), "tuple {t} ν′ binomial: {e2:.3e}≤{h2:.3e}");
        }
        ensure!(le(e1, h1), "tuple {t} ν′ hypergeometric: {e1:.3e}≤{h1:.3e}");

        // p_δ′: independent noise touching at least k_δ rounds.
        let pd = p_delta_prime(b.p_delta, b.k_delta, p.n).unwrap();
        let e = exact(TailKind::Binomial { trials: n, p: rat(b.p_delta) }, Tail::AtLeast(b.k_delta.ceil() as u64));
        ensure!(le(e, pd), "tuple {t} p_δ′: {e:.3e}≤{pd:.3e}");

        // Parallel repetition building blocks.
        let ke = b.k_epsilon as u64;
        if ke as f64 * (1.0 - b.epsilon) > w {
            let e = if w >= 1.0 { exact(TailKind::Binomial { trials: ke, p: rat(1.0 - b.epsilon) }, Tail::AtMost(w as u64 - 1)) } else { 0.0 };
            let h = epsilon_parallel(b.epsilon, b.k_epsilon, p.w).unwrap();
            ensure!(le(e, h), "tuple {t} ε∥: {e:.3e}≤{h:.3e}");
        }
        let kd = b.k_delta as u64;
        if (kd as f64) * b.delta < w {
            let e = exact(TailKind::Binomial { trials: kd, p: rat(b.delta) }, Tail::AtLeast(w.ceil() as u64));
            let h = delta_parallel(b.delta, b.k_delta, p.w).unwrap();
            ensure!(le(e, h), "tuple {t} δ∥: {e:.3e}≤{h:.3e}");
        }
        let f = ((n - b.k_nu as u64) as f64 * (1.0 - b.nu) / 2.0).floor();
        if let Ok(h) = nu_parallel(b.nu, b.k_nu, p.n, f) {
            let e = if f >= 1.0 { exact(TailKind::Binomial { trials: n - b.k_nu as u64, p: rat(1.0 - b.nu) }, Tail::AtMost(f as u64 - 1)) } else { 0.0 };
            ensure!(le(e, h), "tuple {t} ν∥: {e:.3e}≤{h:.3e}");
        }
        compared += 1;
    }
    Ok(format!("{compared} admissible tuples, every exact tail ≤ its Hoeffding term"))
}

fn c11_distinguishing_game() -> Check {
    let layout = GridLayout { rows: 4, cols: 3, cylindrical: false };
    let real = GridComputation::line(&[Angle::new(2), Angle::ZERO, Angle::new(6)]);
    let empty = GridComputation::line(&[Angle::ZERO; 3]);
    let p = Protocol::grid(layout, vec![Some(0), None], real.clone()).unwrap();
    let trials = 10_000;
    let honest = distinguishing_game(&p, &real, &empty, &Adversary::Honest, trials, 110, JOBS).unwrap();
    ensure!(honest.advantage <= 3.0 * honest.sigma + 1e-12, "honest advantage {} ± {}", honest.advantage, honest.sigma);
    // X on the trap centre and on the computation's output vertex.
    let harmful = PauliDeviation::uniform(&set(&[4, 11]), Pauli::X);
    let eps_hat = Rational::one() - scheme_reject_probability(&p.scheme, &harmful).unwrap();
    let bad = distinguishing_game(&p, &real, &empty, &Adversary::Fixed(harmful), trials, 111, JOBS).unwrap();
    ensure!(bad.advantage <= to_f64(&eps_hat) + 3.0 * bad.sigma, "advantage {} above ε̂ {eps_hat}", bad.advantage);
    ensure!(bad.advantage > 0.4, "harmful deviation not visible: {}", bad.advantage);
    Ok(format!(
        "honest {:.4} ± {:.4}; harmful {:.4} ± {:.4} ≤ ε̂ {eps_hat}",
        honest.advantage, honest.sigma, bad.advantage, bad.sigma
    ))
}

fn c12_dual_attack() -> Check {
    let g = OpenGraph::cycle(5);
    let rel = build_relation(&g, standard_candidates(&g).unwrap(), &DeviationSet::AllXY).unwrap();
    let dist = solve_distribution(&rel).unwrap();
    let scheme = to_scheme(&g, &rel, &dist).unwrap();
    let attack: Vec<(PauliDeviation, Rational)> =
        rel.errors.iter().cloned().zip(dist.attack.iter().cloned()).filter(|(_, w)| !w.is_zero()).collect();
    let (r, _) = estimate_rates(&Protocol::trap_only(scheme), &Adversary::Distribution(attack.clone()), 20_000, 12, JOBS).unwrap();
    let detected = 1.0 - r.accept.estimate;
    ensure!((detected - 0.4).abs() <= 3.0 * r.accept.sigma, "detection {detected} ± {}", r.accept.sigma);
    Ok(format!("{} attack deviations, detection {detected:.4} ± {:.4} vs 2/5", attack.len(), r.accept.sigma))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "pentagon optimum", 1, c1_pentagon_optimum),
        (2, "fractional sandwich", 600, c2_fractional_sandwich),
        (3, "general-trap rate", 60, c3_general_traps),
        (4, "twirl cancellation", 5, c4_twirl),
        (5, "protocol correctness", 30, c5_three_vertex_example),
        (6, "trap determinism and predicates", 300, c6_trap_predicates),
        (7, "trap/computation independence", 60, c7_trap_computation_independence),
        (8, "amplification soundness", 600, c8_amplification),
        (9, "majority-vote correctness", 300, c9_majority_vote),
        (10, "tail-bound soundness", 60, c10_tail_soundness),
        (11, "distinguishing game", 300, c11_distinguishing_game),
        (12, "dual-attack realisability", 120, c12_dual_attack),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => Err(format!("{msg}; over the {limit} s limit")),
            o => o,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("acceptance {id:>2} {tag} {name}: {msg} ({:.2} s)", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
