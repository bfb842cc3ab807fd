//! JSON file formats. Rationals travel as strings (`"2/5"`), deviations as
//! maps from vertex to Pauli letter (`{"0": "X", "3": "Y"}`), local states as
//! `"0"`, `"1"`, `"+"`, `"-"`, `"+i"`, `"-i"` or `"+k"` for `|+_{kπ/4}⟩`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use trapkit_core::compiler::{BoundInputs, CompilerParams};
use trapkit_core::mbqc::{Flow, MeasurementPattern};
use trapkit_core::rational::{self, Rational};
use trapkit_core::state::{LocalState, ProductState};
use trapkit_core::traps::{build_general_trap, build_standard_trap, GridComputation, GridLayout, TrappifiedCanvas, TrappifiedScheme};
use trapkit_core::{Angle, OpenGraph, Pauli, PauliDeviation};

use crate::harness::{Adversary, Embedding, Protocol};

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn rational_string(r: &Rational) -> String {
    rational::format(r)
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    rational::parse(s).ok_or_else(|| anyhow!("not a rational number: {s:?}"))
}

pub fn parse_local_state(s: &str) -> Result<LocalState> {
    Ok(match s {
        "0" => LocalState::Zero,
        "1" => LocalState::One,
        "+" => LocalState::PLUS,
        "-" => LocalState::MINUS,
        "+i" => LocalState::PLUS_I,
        "-i" => LocalState::MINUS_I,
        _ => {
            let k = s.strip_prefix("+k").and_then(|k| k.parse::<i64>().ok()).ok_or_else(|| anyhow!("unknown local state {s:?}"))?;
            LocalState::PlusTheta(Angle::new(k))
        }
    })
}

pub fn local_state_string(ls: LocalState) -> String {
    match ls {
        LocalState::Zero => "0".into(),
        LocalState::One => "1".into(),
        LocalState::PlusTheta(a) => match a.k() {
            0 => "+".into(),
            4 => "-".into(),
            2 => "+i".into(),
            6 => "-i".into(),
            k => format!("+k{k}"),
        },
    }
}

fn parse_vertex(s: &str) -> Result<usize> {
    s.parse().map_err(|_| anyhow!("vertex keys must be integers, got {s:?}"))
}

pub type DeviationFile = BTreeMap<String, String>;

pub fn parse_deviation(d: &DeviationFile) -> Result<PauliDeviation> {
    d.iter()
        .map(|(v, p)| {
            let mut chars = p.chars();
            let pauli = match (chars.next(), chars.next()) {
                (Some(c), None) => Pauli::parse(c),
                _ => None,
            };
            Ok((parse_vertex(v)?, pauli.ok_or_else(|| anyhow!("unknown Pauli {p:?}"))?))
        })
        .collect()
}

pub fn deviation_json(d: &PauliDeviation) -> Value {
    Value::Object(d.iter().map(|(v, p)| (v.to_string(), Value::String(p.symbol().to_string()))).collect())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    /// `cycle`, `path`, `complete` (with `n`), `grid`, `cylinder` (with `rows`, `cols`) or `petersen`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// Defaults to `0..=max` over the edge endpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<usize>>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub inputs: Vec<usize>,
    #[serde(default)]
    pub outputs: Vec<usize>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<OpenGraph> {
        let need = |x: Option<usize>, name: &str| x.ok_or_else(|| anyhow!("graph family needs `{name}`"));
        let g = match self.family.as_deref() {
            Some("cycle") => OpenGraph::cycle(need(self.n, "n")?),
            Some("path") => OpenGraph::path(need(self.n, "n")?),
            Some("complete") => OpenGraph::complete(need(self.n, "n")?),
            Some("grid") => OpenGraph::grid(need(self.rows, "rows")?, need(self.cols, "cols")?),
            Some("cylinder") => OpenGraph::cylinder(need(self.rows, "rows")?, need(self.cols, "cols")?),
            Some("petersen") => OpenGraph::petersen(),
            Some(other) => bail!("unknown graph family {other:?}"),
            None => {
                let vertices = match &self.vertices {
                    Some(v) => v.clone(),
                    None => (0..self.edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0)).collect(),
                };
                return Ok(OpenGraph::new(vertices, self.edges.iter().copied(), self.inputs.iter().copied(), self.outputs.iter().copied())?);
            }
        };
        if self.inputs.is_empty() && self.outputs.is_empty() {
            Ok(g)
        } else {
            Ok(g.with_io(self.inputs.iter().copied(), self.outputs.iter().copied())?)
        }
    }

    pub fn from_graph(g: &OpenGraph) -> GraphFile {
        GraphFile {
            vertices: Some(g.vertices().to_vec()),
            edges: g.edges(),
            inputs: g.inputs().iter().copied().collect(),
            outputs: g.outputs().iter().copied().collect(),
            ..GraphFile::default()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CanvasFile {
    Standard { h: Vec<usize> },
    General { h: Vec<usize> },
    Custom { sigma: BTreeMap<String, String>, checks: Vec<Vec<usize>> },
    Empty,
}

impl CanvasFile {
    pub fn to_canvas(&self, g: &OpenGraph) -> Result<TrappifiedCanvas> {
        Ok(match self {
            CanvasFile::Standard { h } => build_standard_trap(g, &h.iter().copied().collect())?,
            CanvasFile::General { h } => build_general_trap(g, &h.iter().copied().collect())?,
            CanvasFile::Custom { sigma, checks } => {
                let sigma = parse_product_state(sigma)?;
                TrappifiedCanvas::custom(g, sigma, checks.iter().map(|c| c.iter().copied().collect()).collect())?
            }
            CanvasFile::Empty => TrappifiedCanvas::empty(),
        })
    }
}

pub fn parse_product_state(m: &BTreeMap<String, String>) -> Result<ProductState> {
    m.iter().map(|(v, s)| Ok((parse_vertex(v)?, parse_local_state(s)?))).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbeddingFile {
    TrapOnly,
    /// Block traps at `trap_cols` (`null`: no trap) on a `rows × cols` grid.
    Grid { rows: usize, cols: usize, #[serde(default)] cylindrical: bool, trap_cols: Vec<Option<usize>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    #[serde(default)]
    pub graph: Option<GraphFile>,
    #[serde(default)]
    pub canvases: Vec<CanvasFile>,
    /// Uniform when absent.
    #[serde(default)]
    pub weights: Option<Vec<String>>,
    #[serde(default)]
    pub embedding: Option<EmbeddingFile>,
}

impl SchemeFile {
    pub fn to_scheme(&self) -> Result<TrappifiedScheme> {
        if let Some(EmbeddingFile::Grid { .. }) = &self.embedding {
            return Ok(self.to_protocol(None)?.scheme);
        }
        let g = self.graph.as_ref().ok_or_else(|| anyhow!("scheme needs a `graph`"))?.to_graph()?;
        let canvases = self.canvases.iter().map(|c| c.to_canvas(&g)).collect::<Result<Vec<_>>>()?;
        Ok(match &self.weights {
            None => TrappifiedScheme::uniform(g, canvases)?,
            Some(w) => TrappifiedScheme::new(g, canvases, w.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)?,
        })
    }

    pub fn to_protocol(&self, computation: Option<GridComputation>) -> Result<Protocol> {
        match &self.embedding {
            None | Some(EmbeddingFile::TrapOnly) => {
                let mut p = Protocol::trap_only(self.to_scheme()?);
                if computation.is_some() {
                    bail!("a trap-only scheme has no room for a computation");
                }
                p.embedding = Embedding::TrapOnly;
                Ok(p)
            }
            Some(EmbeddingFile::Grid { rows, cols, cylindrical, trap_cols }) => {
                let layout = GridLayout { rows: *rows, cols: *cols, cylindrical: *cylindrical };
                let comp = computation.ok_or_else(|| anyhow!("grid schemes need a computation file"))?;
                if self.weights.is_some() || !self.canvases.is_empty() {
                    bail!("grid schemes are uniform over `trap_cols`; drop `canvases` and `weights`");
                }
                Ok(Protocol::grid(layout, trap_cols.clone(), comp)?)
            }
        }
    }

    pub fn from_scheme(s: &TrappifiedScheme) -> SchemeFile {
        let canvases = s
            .canvases
            .iter()
            .map(|c| match &c.kind {
                trapkit_core::traps::CanvasKind::Standard { h } => CanvasFile::Standard { h: h.iter().copied().collect() },
                trapkit_core::traps::CanvasKind::General { h } => CanvasFile::General { h: h.iter().copied().collect() },
                trapkit_core::traps::CanvasKind::Custom if c.checks.is_empty() && c.sigma.is_empty() => CanvasFile::Empty,
                trapkit_core::traps::CanvasKind::Custom => CanvasFile::Custom {
                    sigma: c.sigma.iter().map(|(v, l)| (v.to_string(), local_state_string(*l))).collect(),
                    checks: c.checks.iter().map(|k| k.iter().copied().collect()).collect(),
                },
            })
            .collect();
        SchemeFile {
            graph: Some(GraphFile::from_graph(&s.graph)),
            canvases,
            weights: Some(s.weights.iter().map(rational_string).collect()),
            embedding: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComputationFile {
    /// A one-row line with input `|+⟩`; angles in units of π/4; the last outcome is the result.
    Line { angles: Vec<i64> },
    /// A computation on a `rows × cols` grid; vertex `r·cols + c`.
    Grid {
        rows: usize,
        cols: usize,
        edges: Vec<(usize, usize)>,
        #[serde(default)]
        vertices: Option<Vec<usize>>,
        inputs: BTreeMap<String, String>,
        angles: BTreeMap<String, i64>,
        flow: BTreeMap<String, usize>,
        #[serde(default)]
        outputs: Vec<usize>,
        classical_outputs: Vec<usize>,
    },
}

impl ComputationFile {
    pub fn to_computation(&self) -> Result<GridComputation> {
        match self {
            ComputationFile::Line { angles } => {
                if angles.is_empty() {
                    bail!("a line computation needs at least one angle");
                }
                Ok(GridComputation::line(&angles.iter().map(|&k| Angle::new(k)).collect::<Vec<_>>()))
            }
            ComputationFile::Grid { rows, cols, edges, vertices, inputs, angles, flow, outputs, classical_outputs } => {
                let input = parse_product_state(inputs)?;
                let vertices = vertices.clone().unwrap_or_else(|| (0..rows * cols).collect());
                let g = OpenGraph::new(vertices, edges.iter().copied(), input.keys().copied(), outputs.iter().copied())?;
                let angles = angles.iter().map(|(v, &k)| Ok((parse_vertex(v)?, Angle::new(k)))).collect::<Result<_>>()?;
                let succ = flow.iter().map(|(v, &s)| Ok((parse_vertex(v)?, s))).collect::<Result<_>>()?;
                let flow = Flow::induced(&g, succ);
                Ok(GridComputation {
                    rows: *rows,
                    cols: *cols,
                    pattern: MeasurementPattern::new(g, angles, flow),
                    input,
                    classical_outputs: classical_outputs.clone(),
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedDeviation {
    pub deviation: DeviationFile,
    pub weight: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversaryFile {
    Honest,
    Fixed { deviation: DeviationFile },
    Distribution { deviations: Vec<WeightedDeviation> },
    Noisy { p_delta: f64, benign: Vec<DeviationFile> },
}

impl AdversaryFile {
    pub fn to_adversary(&self) -> Result<Adversary> {
        let a = match self {
            AdversaryFile::Honest => Adversary::Honest,
            AdversaryFile::Fixed { deviation } => Adversary::Fixed(parse_deviation(deviation)?),
            AdversaryFile::Distribution { deviations } => Adversary::Distribution(
                deviations.iter().map(|w| Ok((parse_deviation(&w.deviation)?, parse_rational(&w.weight)?))).collect::<Result<_>>()?,
            ),
            AdversaryFile::Noisy { p_delta, benign } => {
                Adversary::Noisy { p_delta: *p_delta, benign: benign.iter().map(parse_deviation).collect::<Result<_>>()? }
            }
        };
        a.validate()?;
        Ok(a)
    }
}

/// Compiler parameters plus the base scheme's rates and weight thresholds.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(default)]
    pub n: Option<usize>,
    pub d: usize,
    pub s: usize,
    pub w: usize,
    #[serde(default)]
    pub c: f64,
    pub k_eps: f64,
    pub k_delta: f64,
    pub k_nu: f64,
    #[serde(default)]
    pub p_delta: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub nu: f64,
    /// Correct rounds the parallel decoder needs.
    #[serde(default)]
    pub f: Option<f64>,
}

impl ParamsFile {
    pub fn params(&self) -> Result<CompilerParams> {
        let p = CompilerParams { n: self.n.unwrap_or(self.d + self.s), d: self.d, s: self.s, w: self.w, c: self.c };
        p.validate()?;
        Ok(p)
    }

    pub fn inputs(&self) -> BoundInputs {
        BoundInputs {
            epsilon: self.epsilon,
            delta: self.delta,
            nu: self.nu,
            k_epsilon: self.k_eps,
            k_delta: self.k_delta,
            k_nu: self.k_nu,
            p_delta: self.p_delta,
        }
    }
}

/// A list of explicit deviations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeviationListFile {
    pub deviations: Vec<DeviationFile>,
}

pub fn interval_json(i: &crate::harness::Interval) -> Value {
    json!({ "estimate": i.estimate, "lo": i.lo, "hi": i.hi, "sigma": i.sigma })
}

pub fn set_json(s: &BTreeSet<usize>) -> Value {
    Value::Array(s.iter().map(|&v| json!(v)).collect())
}
