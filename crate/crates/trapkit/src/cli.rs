//! Command-line front end. Every command prints one JSON document; stochastic
//! commands refuse to run without `--seed`.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trapkit_core::analysis::{self, AnalysisError, DeviationSet};
use trapkit_core::compiler::{
    bounds_amplified, bounds_parallel, check_admissible, compile_amplified, compile_bqp, compile_parallel, Bound, CompilerError,
};
use trapkit_core::graph::{fractional_chromatic_number, GraphError};
use trapkit_core::mbqc::{validate_flow, FlowViolation, MbqcError};
use trapkit_core::optimizer::{self, OptimizerError};
use trapkit_core::traps::{GridComputation, TrapError};
use trapkit_core::ubqc::DeviationFrame;
use trapkit_core::Angle;

use crate::harness::{self, CompiledAdversary, CompiledSetup, HarnessError, RoundBackend};
use crate::io::{self, AdversaryFile, ComputationFile, DeviationListFile, GraphFile, ParamsFile, SchemeFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "trapkit", version, about = "Trap-based verification of blind delegated quantum computation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Root seed; required by `simulate` and `distinguish`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,
    /// Worker threads for Monte-Carlo commands.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Omit the `generated_at` timestamp so equal inputs give byte-identical output.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the per-row table of `analyze` or `optimize` as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact detection and insensitivity of a scheme over a deviation set.
    Analyze {
        scheme: PathBuf,
        /// `all-xy`, `all-pauli`, `z-only`, or a file `{"deviations": [...]}`.
        #[arg(long, default_value = "all-xy")]
        errors: String,
    },
    /// Optimal distribution over standard or general traps for a graph.
    Optimize {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Family::Standard)]
        family: Family,
        /// Write the optimal scheme as a scheme file.
        #[arg(long)]
        emit_scheme: Option<PathBuf>,
    },
    /// Amplified (or parallel-repetition) security and robustness bounds.
    Bounds {
        params: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
    /// Monte-Carlo accept and corruption rates.
    Simulate {
        scheme: PathBuf,
        #[arg(long)]
        computation: Option<PathBuf>,
        /// Defaults to an honest server.
        #[arg(long)]
        adversary: Option<PathBuf>,
        /// Compile the scheme with these parameters and simulate whole runs.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Amplified)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Backend::Predicate)]
        backend: Backend,
        /// Probability that a computation round is wrong regardless of the server.
        #[arg(long, default_value_t = 0.0)]
        flip: f64,
        #[arg(long, value_enum, default_value_t = Frame::Measurement)]
        frame: Frame,
    },
    /// Real-versus-ideal distinguishing game on a grid scheme.
    Distinguish {
        scheme: PathBuf,
        #[arg(long)]
        computation: PathBuf,
        /// Computation the ideal world runs; an all-zero line of the same length by default.
        #[arg(long)]
        empty: Option<PathBuf>,
        #[arg(long)]
        adversary: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Frame::Measurement)]
        frame: Frame,
    },
    /// Lint a graph, scheme or computation file.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Standard,
    General,
    /// Uniform over an optimal fractional colouring.
    Colouring,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Amplified,
    Bqp,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Predicate,
    Blind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Frame {
    Measurement,
    PreRotation,
}

impl From<Frame> for DeviationFrame {
    fn from(f: Frame) -> DeviationFrame {
        match f {
            Frame::Measurement => DeviationFrame::Measurement,
            Frame::PreRotation => DeviationFrame::PreRotation,
        }
    }
}

/// A finished command: the JSON report and an optional CSV table.
pub struct Output {
    pub report: Value,
    pub csv: Option<String>,
}

pub fn run(cli: &Cli) -> Result<Output> {
    if cli.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let mut out = match &cli.command {
        Command::Analyze { scheme, errors } => analyze(scheme, errors)?,
        Command::Optimize { graph, family, emit_scheme } => optimize(graph, *family, emit_scheme.as_deref())?,
        Command::Bounds { params, parallel } => bounds(params, *parallel)?,
        Command::Simulate { scheme, computation, adversary, params, mode, backend, flip, frame } => {
            let seed = require_seed(cli)?;
            simulate(cli, seed, scheme, computation.as_deref(), adversary.as_deref(), params.as_deref(), *mode, *backend, *flip, *frame)?
        }
        Command::Distinguish { scheme, computation, empty, adversary, frame } => {
            let seed = require_seed(cli)?;
            distinguish(cli, seed, scheme, computation, empty.as_deref(), adversary.as_deref(), *frame)?
        }
        Command::Validate { file } => validate(file)?,
    };
    if let Value::Object(m) = &mut out.report {
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if !cli.deterministic {
            let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            m.insert("generated_at".into(), json!(now));
        }
    }
    Ok(out)
}

/// Runs the command and writes its outputs; returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let result = run(cli).and_then(|out| {
        let text = serde_json::to_string_pretty(&out.report)? + "\n";
        match &cli.out {
            Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        if let Some(p) = &cli.csv {
            let table = out.csv.ok_or_else(|| anyhow!("this command has no CSV table"))?;
            std::fs::write(p, table).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn require_seed(cli: &Cli) -> Result<u64> {
    cli.seed.ok_or_else(|| anyhow!("this command is stochastic; pass --seed"))
}

pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        let code = if let Some(x) = cause.downcast_ref::<CompilerError>() {
            compiler_code(x)
        } else if let Some(x) = cause.downcast_ref::<AnalysisError>() {
            analysis_code(x)
        } else if let Some(x) = cause.downcast_ref::<OptimizerError>() {
            optimizer_code(x)
        } else if let Some(x) = cause.downcast_ref::<HarnessError>() {
            harness_code(x)
        } else if let Some(x) = cause.downcast_ref::<TrapError>() {
            trap_code(x)
        } else if let Some(x) = cause.downcast_ref::<GraphError>() {
            graph_code(x)
        } else if let Some(x) = cause.downcast_ref::<MbqcError>() {
            mbqc_code(x)
        } else {
            None
        };
        if let Some(c) = code {
            return c;
        }
    }
    EXIT_OTHER
}

// Wrappers are `#[error(transparent)]`, which hides the inner error from
// `chain()`, so nested variants are matched by hand.
fn graph_code(e: &GraphError) -> Option<i32> {
    matches!(e, GraphError::CapExceeded { .. }).then_some(EXIT_CAP)
}

fn mbqc_code(e: &MbqcError) -> Option<i32> {
    matches!(e, MbqcError::CapExceeded { .. }).then_some(EXIT_CAP)
}

fn analysis_code(e: &AnalysisError) -> Option<i32> {
    match e {
        AnalysisError::CapExceeded { .. } => Some(EXIT_CAP),
        AnalysisError::Graph(g) => graph_code(g),
        AnalysisError::Mbqc(m) => mbqc_code(m),
        _ => None,
    }
}

fn trap_code(e: &TrapError) -> Option<i32> {
    match e {
        TrapError::Graph(g) => graph_code(g),
        TrapError::Mbqc(m) => mbqc_code(m),
        _ => None,
    }
}

fn optimizer_code(e: &OptimizerError) -> Option<i32> {
    match e {
        OptimizerError::Analysis(a) => analysis_code(a),
        OptimizerError::Graph(g) => graph_code(g),
        OptimizerError::Trap(t) => trap_code(t),
        _ => None,
    }
}

fn compiler_code(e: &CompilerError) -> Option<i32> {
    match e {
        CompilerError::CapExceeded { .. } => Some(EXIT_CAP),
        CompilerError::Inadmissible(_) => Some(EXIT_INADMISSIBLE),
        CompilerError::Trap(t) => trap_code(t),
        _ => None,
    }
}

fn harness_code(e: &HarnessError) -> Option<i32> {
    match e {
        HarnessError::EmbeddingFailed(t) => trap_code(t),
        HarnessError::Analysis(a) => analysis_code(a),
        HarnessError::Mbqc(m) => mbqc_code(m),
        _ => None,
    }
}

fn deviation_set(spec: &str) -> Result<DeviationSet> {
    Ok(match spec {
        "all-xy" => DeviationSet::AllXY,
        "all-pauli" => DeviationSet::AllPauli,
        "z-only" => DeviationSet::ZOnly,
        path => {
            let f: DeviationListFile = io::read_json(Path::new(path))?;
            DeviationSet::Explicit(f.deviations.iter().map(io::parse_deviation).collect::<Result<_>>()?)
        }
    })
}

fn analyze(scheme: &Path, errors: &str) -> Result<Output> {
    let s = io::read_json::<SchemeFile>(scheme)?.to_scheme()?;
    let set = deviation_set(errors)?;
    let rows = analysis::evaluate(&s, &set)?;
    let epsilon = analysis::epsilon_of(&rows);
    let delta = analysis::delta_of(&rows);
    let rate = <trapkit_core::Rational as num_traits::One>::one() - &epsilon.value;
    let mut csv = String::from("deviation,reject_probability\n");
    for (d, p) in &rows {
        csv.push_str(&format!("{},{}\n", d, io::rational_string(p)));
    }
    let report = json!({
        "command": "analyze",
        "errors": errors,
        "deviations_checked": rows.len(),
        "rate": io::rational_string(&rate),
        "epsilon": io::rational_string(&epsilon.value),
        "epsilon_witness": io::deviation_json(&epsilon.witness),
        "delta": io::rational_string(&delta.value),
        "delta_witness": io::deviation_json(&delta.witness),
    });
    Ok(Output { report, csv: Some(csv) })
}

fn optimize(graph: &Path, family: Family, emit: Option<&Path>) -> Result<Output> {
    let g = io::read_json::<GraphFile>(graph)?.to_graph()?;
    let (scheme, mut report, csv) = match family {
        Family::Colouring => {
            let (scheme, rate) = optimizer::colouring_distribution(&g)?;
            let mut csv = String::from("set,weight\n");
            let tests: Vec<Value> = scheme
                .canvases
                .iter()
                .zip(&scheme.weights)
                .map(|(c, w)| {
                    let h = c.h().cloned().unwrap_or_default();
                    csv.push_str(&format!("{},{}\n", set_string(&h), io::rational_string(w)));
                    json!({ "h": io::set_json(&h), "weight": io::rational_string(w) })
                })
                .collect();
            (scheme, json!({ "rate": io::rational_string(&rate), "tests": tests }), csv)
        }
        Family::Standard | Family::General => {
            let candidates = match family {
                Family::Standard => optimizer::standard_candidates(&g)?,
                _ => optimizer::general_candidates(&g)?,
            };
            let rel = optimizer::build_relation(&g, candidates, &DeviationSet::AllXY)?;
            let dist = optimizer::solve_distribution(&rel)?;
            let scheme = optimizer::to_scheme(&g, &rel, &dist)?;
            let mut csv = String::from("set,weight\n");
            let mut tests = Vec::new();
            for (t, w) in rel.tests.iter().zip(&dist.weights) {
                if num_traits::Zero::is_zero(w) {
                    continue;
                }
                let h = t.h().cloned().unwrap_or_default();
                csv.push_str(&format!("{},{}\n", set_string(&h), io::rational_string(w)));
                tests.push(json!({ "h": io::set_json(&h), "weight": io::rational_string(w) }));
            }
            let attack: Vec<Value> = rel
                .errors
                .iter()
                .zip(&dist.attack)
                .filter(|(_, w)| !num_traits::Zero::is_zero(*w))
                .map(|(e, w)| json!({ "deviation": io::deviation_json(e), "weight": io::rational_string(w) }))
                .collect();
            let report = json!({
                "rate": io::rational_string(&dist.rate),
                "tests": tests,
                "attack": attack,
                "non_unique": dist.non_unique,
                "undetected": dist.undetected.map(|e| io::deviation_json(&rel.errors[e])),
                "error_classes": rel.errors.len(),
            });
            (scheme, report, csv)
        }
    };
    if let Value::Object(m) = &mut report {
        m.insert("command".into(), json!("optimize"));
        m.insert("family".into(), json!(format!("{family:?}").to_lowercase()));
        if let Ok(fc) = fractional_chromatic_number(&g) {
            m.insert("fractional_chromatic_number".into(), json!(io::rational_string(&fc.value)));
        }
    }
    if let Some(path) = emit {
        let text = serde_json::to_string_pretty(&SchemeFile::from_scheme(&scheme))? + "\n";
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Output { report, csv: Some(csv) })
}

fn set_string(s: &BTreeSet<usize>) -> String {
    let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

fn bound_json(b: &Bound) -> Value {
    json!({ "value": b.value, "chi": b.chi })
}

fn bounds(path: &Path, parallel: bool) -> Result<Output> {
    let f: ParamsFile = io::read_json(path)?;
    let inputs = f.inputs();
    let report = if parallel {
        let n = f.n.unwrap_or(f.d + f.s);
        let fr = f.f.ok_or_else(|| anyhow!("parallel bounds need `f`, the number of correct rounds the decoder needs"))?;
        let b = bounds_parallel(&inputs, n, f.w, fr)?;
        json!({
            "command": "bounds",
            "mode": "parallel",
            "epsilon": b.epsilon,
            "delta": b.delta,
            "nu": b.nu,
        })
    } else {
        let p = f.params()?;
        check_admissible(&inputs, &p)?;
        let b = bounds_amplified(&inputs, &p)?;
        json!({
            "command": "bounds",
            "mode": "amplified",
            "epsilon": bound_json(&b.epsilon),
            "delta": bound_json(&b.delta),
            "nu": bound_json(&b.nu),
            "nu_alt": bound_json(&b.nu_alt),
            "p_delta": b.p_delta,
        })
    };
    Ok(Output { report, csv: None })
}

fn load_computation(path: &Path) -> Result<(ComputationFile, GridComputation)> {
    let f: ComputationFile = io::read_json(path)?;
    let c = f.to_computation()?;
    Ok((f, c))
}

fn load_adversary(path: Option<&Path>) -> Result<AdversaryFile> {
    match path {
        Some(p) => io::read_json(p),
        None => Ok(AdversaryFile::Honest),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    cli: &Cli,
    seed: u64,
    scheme: &Path,
    computation: Option<&Path>,
    adversary: Option<&Path>,
    params: Option<&Path>,
    mode: Mode,
    backend: Backend,
    flip: f64,
    frame: Frame,
) -> Result<Output> {
    let sf: SchemeFile = io::read_json(scheme)?;
    let comp = computation.map(load_computation).transpose()?.map(|(_, c)| c);
    let adv = load_adversary(adversary)?;
    let report = match params {
        None => {
            let mut p = sf.to_protocol(comp)?;
            p.frame = frame.into();
            let adv = adv.to_adversary()?;
            let (r, _) = harness::estimate_rates(&p, &adv, cli.trials, seed, cli.jobs)?;
            json!({
                "command": "simulate",
                "seed": seed,
                "trials": r.trials,
                "accepts": r.accepts,
                "accept": io::interval_json(&r.accept),
                "reject": io::interval_json(&harness::wilson(r.trials - r.accepts, r.trials)),
                "corrupt_accepts": r.corrupt_accepts,
                "corrupt_accept": io::interval_json(&r.corrupt_accept),
            })
        }
        Some(pp) => {
            let pf: ParamsFile = io::read_json(pp)?;
            let base = match (&sf.embedding, &comp) {
                (Some(io::EmbeddingFile::Grid { .. }), Some(c)) => sf.to_protocol(Some(c.clone()))?.scheme,
                _ => sf.to_scheme()?,
            };
            let compiled = match mode {
                Mode::Amplified => compile_amplified(base, pf.params()?)?,
                Mode::Bqp => compile_bqp(base, pf.params()?)?,
                Mode::Parallel => compile_parallel(base, pf.n.unwrap_or(pf.d + pf.s), pf.w)?,
            };
            let cadv = match adv {
                AdversaryFile::Honest => CompiledAdversary::Honest,
                AdversaryFile::Noisy { p_delta, benign } => {
                    CompiledAdversary::Noisy { p_delta, benign: benign.iter().map(io::parse_deviation).collect::<Result<_>>()? }
                }
                AdversaryFile::Fixed { deviation } => {
                    // The same deviation on every round.
                    let d = io::parse_deviation(&deviation)?;
                    CompiledAdversary::Rounds((0..compiled.params.n).map(|i| (i, d.clone())).collect())
                }
                AdversaryFile::Distribution { .. } => bail!("compiled runs take honest, fixed or noisy adversaries"),
            };
            let setup = CompiledSetup {
                compiled,
                computation: comp,
                flip,
                backend: match backend {
                    Backend::Predicate => RoundBackend::Predicate,
                    Backend::Blind => RoundBackend::Blind,
                },
                frame: frame.into(),
            };
            let r = harness::estimate_compiled(&setup, &cadv, cli.trials, seed, cli.jobs)?;
            json!({
                "command": "simulate",
                "mode": format!("{mode:?}").to_lowercase(),
                "seed": seed,
                "trials": r.trials,
                "accept": io::interval_json(&r.accept),
                "reject": io::interval_json(&r.reject),
                "wrong_decode": io::interval_json(&r.wrong_decode),
                "wrong_accept": io::interval_json(&r.wrong_accept),
            })
        }
    };
    Ok(Output { report, csv: None })
}

fn distinguish(
    cli: &Cli,
    seed: u64,
    scheme: &Path,
    computation: &Path,
    empty: Option<&Path>,
    adversary: Option<&Path>,
    frame: Frame,
) -> Result<Output> {
    let sf: SchemeFile = io::read_json(scheme)?;
    let (rf, real) = load_computation(computation)?;
    let empty = match (empty, rf) {
        (Some(p), _) => load_computation(p)?.1,
        (None, ComputationFile::Line { angles }) => GridComputation::line(&vec![Angle::ZERO; angles.len()]),
        (None, ComputationFile::Grid { .. }) => bail!("grid computations need an explicit --empty computation"),
    };
    let mut p = sf.to_protocol(Some(real.clone()))?;
    p.frame = frame.into();
    let adv = load_adversary(adversary)?.to_adversary()?;
    let r = harness::distinguishing_game(&p, &real, &empty, &adv, cli.trials, seed, cli.jobs)?;
    let report = json!({
        "command": "distinguish",
        "seed": seed,
        "trials": r.trials,
        "real_accept": io::interval_json(&r.real_accept),
        "ideal_accept": io::interval_json(&r.ideal_accept),
        "advantage": r.advantage,
        "sigma": r.sigma,
    });
    Ok(Output { report, csv: None })
}

fn validate(path: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut problems: Vec<String> = Vec::new();
    let kind;
    if v.get("canvases").is_some() || v.get("embedding").is_some() {
        kind = "scheme";
        let sf: SchemeFile = serde_json::from_value(v)?;
        match sf.embedding {
            Some(io::EmbeddingFile::Grid { .. }) => {
                // A one-vertex computation is enough to exercise every embedding.
                match sf.to_protocol(Some(GridComputation::line(&[Angle::ZERO]))) {
                    Err(e) => problems.push(format!("{e:#}")),
                    Ok(p) => {
                        for i in 0..p.scheme.canvases.len() {
                            if let Err(e) = p.instance(i, None).map_err(anyhow::Error::from).and_then(|tp| Ok(tp.is_proper()?)) {
                                problems.push(format!("canvas {i}: {e:#}"));
                            }
                        }
                    }
                }
            }
            _ => match sf.to_scheme() {
                Err(e) => problems.push(format!("{e:#}")),
                Ok(s) => {
                    for (i, c) in s.canvases.iter().enumerate() {
                        match analysis::reject_probability(&s.graph, c, &Default::default()) {
                            Ok(r) if num_traits::Zero::is_zero(&r) => {}
                            Ok(r) => problems.push(format!("canvas {i} rejects an honest server with probability {}", io::rational_string(&r))),
                            Err(e) => problems.push(format!("canvas {i}: {e}")),
                        }
                    }
                }
            },
        }
    } else if v.get("kind").is_some() {
        kind = "computation";
        let cf: ComputationFile = serde_json::from_value(v)?;
        match cf.to_computation() {
            Err(e) => problems.push(format!("{e:#}")),
            // The last classical output needs no successor: nothing is measured after it.
            Ok(c) => problems.extend(
                validate_flow(&c.pattern)
                    .iter()
                    .filter(|f| !matches!(f, FlowViolation::MissingSuccessor(v) if c.classical_outputs.contains(v)))
                    .map(|f| format!("flow: {f:?}")),
            ),
        }
    } else {
        kind = "graph";
        let gf: GraphFile = serde_json::from_value(v)?;
        if let Err(e) = gf.to_graph() {
            problems.push(format!("{e:#}"));
        }
    }
    if !problems.is_empty() {
        bail!("{} is not a valid {kind} file:\n  {}", path.display(), problems.join("\n  "));
    }
    Ok(Output { report: json!({ "command": "validate", "kind": kind, "valid": true }), csv: None })
}
