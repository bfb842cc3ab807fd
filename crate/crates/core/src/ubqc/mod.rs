//! Blind delegation of measurement patterns.
//!
//! The client hides every angle behind a one-time pad `θ(i) ∈ Θ`, every
//! outcome behind a bit `r(i)`, and every prepared input behind `X^{a(i)}`.
//! It sends `Z(θ(i)) X^{a(i)} ρ_i` for each vertex (`ρ_i = |+⟩` unless the
//! vertex is supplied in the input state) and then the angles
//! `δ(i) = (−1)^{a(i)} φ'(i) + θ(i) + (r(i) + a_N(i))π`, where `φ'` is computed
//! from decrypted outcomes `s(j) = b(j) ⊕ r(j)`. Output vertices use
//! `θ(i) = (r(i) + a_N(i))π` and are decrypted with `Z^{s_Z + r} X^{s_X + a}`.
//!
//! Client and server are explicit state machines exchanging [`Message`]s.

pub mod codec;
pub mod twirl;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::angle::Angle;
use crate::graph::OpenGraph;
use crate::mbqc::{corrected_angle, measurement_order, Dependencies, MbqcError, MeasurementPattern, OutcomeSource};
use crate::pauli::{Pauli, PauliDeviation};
use crate::state::{LocalState, QuantumState, StateError};

pub use codec::{decode, encode, CodecError};
pub use twirl::{twirl_residual, twirl_sum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("{role} in phase {phase} cannot handle {message}")]
    Unexpected { role: &'static str, phase: &'static str, message: &'static str },
    #[error("angle for vertex {got} arrived, expected {expected:?}")]
    OutOfOrder { expected: Option<usize>, got: usize },
    #[error("vertex {0} cannot be measured")]
    NotMeasurable(usize),
    #[error("qubit register does not match the graph")]
    RegisterMismatch,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Where a server-side Pauli deviation acts on a measured qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DeviationFrame {
    /// After the rotation and Hadamard, just before the computational-basis
    /// read-out: X or Y flips the outcome, Z has no effect.
    #[default]
    Measurement,
    /// Before the rotation: Z shifts the measured angle by π, X negates it.
    PreRotation,
}

/// The client's one-time pads.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClientSecrets {
    pub theta: BTreeMap<usize, Angle>,
    pub r: BTreeMap<usize, u8>,
    pub a: BTreeMap<usize, u8>,
}

impl ClientSecrets {
    /// Fresh pads; `encrypted` are the vertices carrying client-supplied states.
    pub fn sample<R: RngCore + ?Sized>(g: &OpenGraph, encrypted: &BTreeSet<usize>, rng: &mut R) -> ClientSecrets {
        let mut thetas = BTreeMap::new();
        let mut r = BTreeMap::new();
        let mut a = BTreeMap::new();
        for &v in g.vertices() {
            r.insert(v, rng.gen_range(0..2u8));
            a.insert(v, if encrypted.contains(&v) { rng.gen_range(0..2u8) } else { 0 });
            if !g.outputs().contains(&v) {
                thetas.insert(v, Angle::new(rng.gen_range(0..8)));
            }
        }
        ClientSecrets::from_parts(g, thetas, r, a)
    }

    /// Completes `θ` on outputs as `(r + a_N)π`; missing `r`, `a` default to 0.
    pub fn from_parts(g: &OpenGraph, mut theta: BTreeMap<usize, Angle>, r: BTreeMap<usize, u8>, a: BTreeMap<usize, u8>) -> ClientSecrets {
        let mut s = ClientSecrets { theta: BTreeMap::new(), r, a };
        for &v in g.vertices() {
            s.r.entry(v).or_insert(0);
            s.a.entry(v).or_insert(0);
        }
        for &o in g.outputs() {
            theta.insert(o, Angle::ZERO.plus_pi(s.r[&o] ^ s.a_n(g, o)));
        }
        for &v in g.vertices() {
            theta.entry(v).or_insert(Angle::ZERO);
        }
        s.theta = theta;
        s
    }

    /// `a_N(i) = ⊕_{j ∈ N(i)} a(j)`.
    pub fn a_n(&self, g: &OpenGraph, i: usize) -> u8 {
        g.neighbours(i).fold(0, |acc, j| acc ^ self.a.get(&j).copied().unwrap_or(0))
    }
}

/// Protocol messages. `Graph`, `Qubits`, `Angle` and `RequestOutputs` flow
/// client → server; the rest server → client.
#[derive(Clone, Debug, PartialEq)]
pub enum Message {
    Graph { graph: OpenGraph, order: Vec<usize> },
    Qubits(QuantumState),
    Ack,
    Angle { vertex: usize, delta: Angle },
    Outcome { vertex: usize, bit: u8 },
    RequestOutputs,
    Outputs(QuantumState),
}

impl Message {
    fn name(&self) -> &'static str {
        match self {
            Message::Graph { .. } => "Graph",
            Message::Qubits(_) => "Qubits",
            Message::Ack => "Ack",
            Message::Angle { .. } => "Angle",
            Message::Outcome { .. } => "Outcome",
            Message::RequestOutputs => "RequestOutputs",
            Message::Outputs(_) => "Outputs",
        }
    }
}

/// What the server saw and answered for one measured vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub vertex: usize,
    pub delta: Angle,
    pub outcome: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClientPhase {
    Start,
    AwaitGraphAck,
    AwaitQubitAck,
    AwaitOutcome(usize),
    AwaitOutputs,
    Done,
}

impl ClientPhase {
    fn name(self) -> &'static str {
        match self {
            ClientPhase::Start => "Start",
            ClientPhase::AwaitGraphAck => "AwaitGraphAck",
            ClientPhase::AwaitQubitAck => "AwaitQubitAck",
            ClientPhase::AwaitOutcome(_) => "AwaitOutcome",
            ClientPhase::AwaitOutputs => "AwaitOutputs",
            ClientPhase::Done => "Done",
        }
    }
}

/// Client side of a blind session.
#[derive(Clone, Debug)]
pub struct Client {
    pattern: MeasurementPattern,
    order: Vec<usize>,
    deps: Dependencies,
    secrets: ClientSecrets,
    input: QuantumState,
    phase: ClientPhase,
    next: usize,
    raw: BTreeMap<usize, u8>,
    decrypted: BTreeMap<usize, u8>,
    output: Option<QuantumState>,
    transcript: Vec<TranscriptEntry>,
}

impl Client {
    /// `input` must cover every input vertex; any further labelled vertices
    /// are also prepared from it (and padded with `a`).
    pub fn new(pattern: MeasurementPattern, input: QuantumState, secrets: ClientSecrets) -> Result<Client, ProtocolError> {
        for &v in pattern.graph.inputs() {
            if !input.labels().contains(&v) {
                return Err(MbqcError::MissingInput(v).into());
            }
        }
        if let Some(&q) = input.labels().iter().find(|q| !pattern.graph.contains(**q)) {
            return Err(MbqcError::InputNotInGraph(q).into());
        }
        for v in pattern.measured() {
            if !pattern.angles.contains_key(&v) {
                return Err(MbqcError::MissingAngle(v).into());
            }
        }
        let order = measurement_order(&pattern)?;
        let deps = Dependencies::of(&pattern);
        Ok(Client {
            pattern,
            order,
            deps,
            secrets,
            input,
            phase: ClientPhase::Start,
            next: 0,
            raw: BTreeMap::new(),
            decrypted: BTreeMap::new(),
            output: None,
            transcript: Vec::new(),
        })
    }

    pub fn is_done(&self) -> bool {
        self.phase == ClientPhase::Done
    }

    /// Decrypted outcomes `s(j)`.
    pub fn outcomes(&self) -> &BTreeMap<usize, u8> {
        &self.decrypted
    }

    pub fn raw_outcomes(&self) -> &BTreeMap<usize, u8> {
        &self.raw
    }

    pub fn output(&self) -> Option<&QuantumState> {
        self.output.as_ref()
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn secrets(&self) -> &ClientSecrets {
        &self.secrets
    }

    fn unexpected(&self, m: &Message) -> ProtocolError {
        ProtocolError::Unexpected { role: "client", phase: self.phase.name(), message: m.name() }
    }

    fn encrypted_qubits(&self) -> Result<QuantumState, ProtocolError> {
        let g = &self.pattern.graph;
        let mut s = self.input.clone();
        for &q in self.input.labels() {
            if self.secrets.a[&q] == 1 {
                s.apply_pauli(q, Pauli::X)?;
            }
        }
        for &v in g.vertices() {
            if !self.input.labels().contains(&v) {
                s.push_qubit(v, LocalState::PLUS)?;
            }
        }
        for &v in g.vertices() {
            s.apply_phase(v, self.secrets.theta[&v])?;
        }
        Ok(s)
    }

    fn delta(&self, v: usize) -> Angle {
        let (sx, sz) = self.deps.signals(v, &self.decrypted);
        let phi = corrected_angle(self.pattern.angles[&v], sx, sz);
        let a = self.secrets.a[&v];
        phi.signed(a) + self.secrets.theta[&v] + Angle::ZERO.plus_pi(self.secrets.r[&v] ^ self.secrets.a_n(&self.pattern.graph, v))
    }

    fn next_request(&mut self) -> Message {
        if let Some(&v) = self.order.get(self.next) {
            self.phase = ClientPhase::AwaitOutcome(v);
            Message::Angle { vertex: v, delta: self.delta(v) }
        } else {
            self.phase = ClientPhase::AwaitOutputs;
            Message::RequestOutputs
        }
    }

    /// Advances the client; `None` incoming starts the session.
    pub fn step(&mut self, incoming: Option<Message>) -> Result<Option<Message>, ProtocolError> {
        match (self.phase, incoming) {
            (ClientPhase::Start, None) => {
                self.phase = ClientPhase::AwaitGraphAck;
                Ok(Some(Message::Graph { graph: self.pattern.graph.clone(), order: self.order.clone() }))
            }
            (ClientPhase::AwaitGraphAck, Some(Message::Ack)) => {
                self.phase = ClientPhase::AwaitQubitAck;
                Ok(Some(Message::Qubits(self.encrypted_qubits()?)))
            }
            (ClientPhase::AwaitQubitAck, Some(Message::Ack)) => Ok(Some(self.next_request())),
            (ClientPhase::AwaitOutcome(v), Some(Message::Outcome { vertex, bit })) if vertex == v => {
                let delta = self.delta(v);
                self.raw.insert(v, bit & 1);
                self.decrypted.insert(v, (bit ^ self.secrets.r[&v]) & 1);
                self.transcript.push(TranscriptEntry { vertex: v, delta, outcome: bit & 1 });
                self.next += 1;
                Ok(Some(self.next_request()))
            }
            (ClientPhase::AwaitOutputs, Some(Message::Outputs(mut state))) => {
                for &o in self.pattern.graph.outputs() {
                    let (sx, sz) = self.deps.signals(o, &self.decrypted);
                    if sx ^ self.secrets.a[&o] == 1 {
                        state.apply_pauli(o, Pauli::X)?;
                    }
                    if sz ^ self.secrets.r[&o] == 1 {
                        state.apply_pauli(o, Pauli::Z)?;
                    }
                }
                let outs: Vec<usize> = self.pattern.graph.outputs().iter().copied().collect();
                self.output = Some(state.permuted(&outs).map_err(|_| ProtocolError::RegisterMismatch)?);
                self.phase = ClientPhase::Done;
                Ok(None)
            }
            (_, Some(m)) => Err(self.unexpected(&m)),
            (_, None) => Err(ProtocolError::Unexpected { role: "client", phase: self.phase.name(), message: "nothing" }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ServerPhase {
    AwaitGraph,
    AwaitQubits,
    Measuring,
    Done,
}

impl ServerPhase {
    fn name(self) -> &'static str {
        match self {
            ServerPhase::AwaitGraph => "AwaitGraph",
            ServerPhase::AwaitQubits => "AwaitQubits",
            ServerPhase::Measuring => "Measuring",
            ServerPhase::Done => "Done",
        }
    }
}

/// Server side: honest apart from a fixed Pauli deviation.
pub struct Server<S: OutcomeSource> {
    deviation: PauliDeviation,
    frame: DeviationFrame,
    source: S,
    phase: ServerPhase,
    graph: Option<OpenGraph>,
    order: Vec<usize>,
    next: usize,
    state: Option<QuantumState>,
}

impl<S: OutcomeSource> Server<S> {
    pub fn new(deviation: PauliDeviation, frame: DeviationFrame, source: S) -> Server<S> {
        Server { deviation, frame, source, phase: ServerPhase::AwaitGraph, graph: None, order: Vec::new(), next: 0, state: None }
    }

    pub fn honest(source: S) -> Server<S> {
        Server::new(PauliDeviation::identity(), DeviationFrame::Measurement, source)
    }

    fn unexpected(&self, m: &Message) -> ProtocolError {
        ProtocolError::Unexpected { role: "server", phase: self.phase.name(), message: m.name() }
    }

    pub fn step(&mut self, incoming: Message) -> Result<Option<Message>, ProtocolError> {
        match (self.phase, incoming) {
            (ServerPhase::AwaitGraph, Message::Graph { graph, order }) => {
                self.graph = Some(graph);
                self.order = order;
                self.phase = ServerPhase::AwaitQubits;
                Ok(Some(Message::Ack))
            }
            (ServerPhase::AwaitQubits, Message::Qubits(mut state)) => {
                let g = self.graph.as_ref().expect("graph received");
                let mut labels = state.labels().to_vec();
                labels.sort_unstable();
                if labels != g.vertices() {
                    return Err(ProtocolError::RegisterMismatch);
                }
                for (a, b) in g.edges() {
                    state.apply_cz(a, b)?;
                }
                self.state = Some(state);
                self.phase = ServerPhase::Measuring;
                Ok(Some(Message::Ack))
            }
            (ServerPhase::Measuring, Message::Angle { vertex, delta }) => {
                let expected = self.order.get(self.next).copied();
                if expected != Some(vertex) {
                    return Err(ProtocolError::OutOfOrder { expected, got: vertex });
                }
                let state = self.state.as_mut().expect("qubits received");
                let dev = self.deviation.get(vertex);
                if self.frame == DeviationFrame::PreRotation {
                    state.apply_pauli(vertex, dev)?;
                }
                state.apply_phase(vertex, -delta)?;
                state.apply_h(vertex)?;
                if self.frame == DeviationFrame::Measurement {
                    state.apply_pauli(vertex, dev)?;
                }
                let p0 = state.prob_zero(vertex)?;
                let bit = self.source.outcome(vertex, p0)? & 1;
                state
                    .measure_remove(vertex, bit)
                    .map_err(|_| MbqcError::ImpossibleOutcome { vertex, outcome: bit })?;
                self.next += 1;
                Ok(Some(Message::Outcome { vertex, bit }))
            }
            (ServerPhase::Measuring, Message::RequestOutputs) => {
                let mut state = self.state.take().expect("qubits received");
                if state.labels().iter().any(|l| !self.graph.as_ref().expect("graph").outputs().contains(l)) {
                    return Err(ProtocolError::NotMeasurable(self.order.get(self.next).copied().unwrap_or(usize::MAX)));
                }
                for &o in state.labels().to_vec().iter() {
                    state.apply_pauli(o, self.deviation.get(o))?;
                }
                self.phase = ServerPhase::Done;
                Ok(Some(Message::Outputs(state)))
            }
            (_, m) => Err(self.unexpected(&m)),
        }
    }
}

/// Everything a finished blind session produced.
#[derive(Clone, Debug)]
pub struct BlindRun {
    /// Decrypted outcomes `s(j) = b(j) ⊕ r(j)`.
    pub outcomes: BTreeMap<usize, u8>,
    /// Outcomes as reported by the server.
    pub raw: BTreeMap<usize, u8>,
    /// Decrypted output state over sorted output vertices.
    pub output: QuantumState,
    pub transcript: Vec<TranscriptEntry>,
}

/// Drives a client and a deviating server to completion in-process.
pub fn run_blind_session<S: OutcomeSource>(
    pattern: &MeasurementPattern,
    input: &QuantumState,
    secrets: ClientSecrets,
    deviation: &PauliDeviation,
    frame: DeviationFrame,
    source: S,
) -> Result<BlindRun, ProtocolError> {
    let mut client = Client::new(pattern.clone(), input.clone(), secrets)?;
    let mut server = Server::new(deviation.clone(), frame, source);
    let mut msg = client.step(None)?;
    while let Some(m) = msg {
        let reply = server.step(m)?.expect("server always answers");
        msg = client.step(Some(reply))?;
    }
    Ok(BlindRun {
        outcomes: client.decrypted,
        raw: client.raw,
        output: client.output.expect("client finished"),
        transcript: client.transcript,
    })
}

/// Same as [`run_blind_session`] but every message is encoded and decoded.
pub fn run_blind_session_encoded<S: OutcomeSource>(
    pattern: &MeasurementPattern,
    input: &QuantumState,
    secrets: ClientSecrets,
    deviation: &PauliDeviation,
    frame: DeviationFrame,
    source: S,
) -> Result<BlindRun, ProtocolError> {
    let mut client = Client::new(pattern.clone(), input.clone(), secrets)?;
    let mut server = Server::new(deviation.clone(), frame, source);
    let mut msg = client.step(None)?;
    while let Some(m) = msg {
        let (m, _) = decode(&encode(&m))?;
        let reply = server.step(m)?.expect("server always answers");
        let (reply, _) = decode(&encode(&reply))?;
        msg = client.step(Some(reply))?;
    }
    Ok(BlindRun {
        outcomes: client.decrypted,
        raw: client.raw,
        output: client.output.expect("client finished"),
        transcript: client.transcript,
    })
}
