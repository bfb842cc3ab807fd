//! Length-prefixed binary encoding of protocol messages.
//!
//! Frame: `u32` little-endian payload length, then the payload. Payload: one
//! tag byte followed by fixed-width little-endian fields; vertex ids are `u64`,
//! amplitudes are `(f64, f64)` pairs.

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use super::Message;
use crate::angle::Angle;
use crate::graph::OpenGraph;
use crate::state::QuantumState;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("input ended early")]
    Truncated,
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("payload length {declared} disagrees with content ({used} bytes used)")]
    LengthMismatch { declared: usize, used: usize },
    #[error("malformed payload: {0}")]
    Malformed(&'static str),
}

const TAG_GRAPH: u8 = 1;
const TAG_QUBITS: u8 = 2;
const TAG_ACK: u8 = 3;
const TAG_ANGLE: u8 = 4;
const TAG_OUTCOME: u8 = 5;
const TAG_REQUEST: u8 = 6;
const TAG_OUTPUTS: u8 = 7;

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u64).to_le_bytes());
}

fn put_ids(out: &mut Vec<u8>, ids: impl ExactSizeIterator<Item = usize>) {
    put_u32(out, ids.len());
    for v in ids {
        put_u64(out, v);
    }
}

fn put_state(out: &mut Vec<u8>, s: &QuantumState) {
    put_ids(out, s.labels().iter().copied());
    for a in s.amplitudes() {
        out.extend_from_slice(&a.re.to_le_bytes());
        out.extend_from_slice(&a.im.to_le_bytes());
    }
}

pub fn encode(m: &Message) -> Vec<u8> {
    let mut p = Vec::new();
    match m {
        Message::Graph { graph, order } => {
            p.push(TAG_GRAPH);
            put_ids(&mut p, graph.vertices().iter().copied());
            let edges = graph.edges();
            put_u32(&mut p, edges.len());
            for (a, b) in edges {
                put_u64(&mut p, a);
                put_u64(&mut p, b);
            }
            put_ids(&mut p, graph.inputs().iter().copied());
            put_ids(&mut p, graph.outputs().iter().copied());
            put_ids(&mut p, order.iter().copied());
        }
        Message::Qubits(s) => {
            p.push(TAG_QUBITS);
            put_state(&mut p, s);
        }
        Message::Ack => p.push(TAG_ACK),
        Message::Angle { vertex, delta } => {
            p.push(TAG_ANGLE);
            put_u64(&mut p, *vertex);
            p.push(delta.k());
        }
        Message::Outcome { vertex, bit } => {
            p.push(TAG_OUTCOME);
            put_u64(&mut p, *vertex);
            p.push(*bit);
        }
        Message::RequestOutputs => p.push(TAG_REQUEST),
        Message::Outputs(s) => {
            p.push(TAG_OUTPUTS);
            put_state(&mut p, s);
        }
    }
    let mut out = Vec::with_capacity(p.len() + 4);
    put_u32(&mut out, p.len());
    out.extend_from_slice(&p);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], CodecError> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(CodecError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn u64(&mut self) -> Result<usize, CodecError> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| CodecError::Malformed("vertex id overflows usize"))
    }

    fn f64(&mut self) -> Result<f64, CodecError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn ids(&mut self) -> Result<Vec<usize>, CodecError> {
        let n = self.u32()?;
        if n > self.buf.len() {
            return Err(CodecError::Truncated);
        }
        (0..n).map(|_| self.u64()).collect()
    }

    fn state(&mut self) -> Result<QuantumState, CodecError> {
        let labels = self.ids()?;
        if labels.len() > crate::state::MAX_STATEVECTOR_QUBITS {
            return Err(CodecError::Malformed("register exceeds the simulator cap"));
        }
        let amps = (0..1usize << labels.len()).map(|_| Ok(Complex64::new(self.f64()?, self.f64()?))).collect::<Result<Vec<_>, CodecError>>()?;
        QuantumState::from_amplitudes(labels, amps).map_err(|_| CodecError::Malformed("duplicate qubit label"))
    }
}

/// Decodes one frame; returns the message and the bytes consumed.
pub fn decode(buf: &[u8]) -> Result<(Message, usize), CodecError> {
    let mut head = Reader { buf, pos: 0 };
    let len = head.u32()?;
    let payload = head.take(len)?;
    let mut r = Reader { buf: payload, pos: 0 };
    let m = match r.u8()? {
        TAG_GRAPH => {
            let vertices = r.ids()?;
            let ne = r.u32()?;
            if ne > payload.len() {
                return Err(CodecError::Truncated);
            }
            let edges = (0..ne).map(|_| Ok((r.u64()?, r.u64()?))).collect::<Result<Vec<_>, CodecError>>()?;
            let inputs = r.ids()?;
            let outputs = r.ids()?;
            let order = r.ids()?;
            let graph = OpenGraph::new(vertices, edges, inputs, outputs).map_err(|_| CodecError::Malformed("invalid graph"))?;
            Message::Graph { graph, order }
        }
        TAG_QUBITS => Message::Qubits(r.state()?),
        TAG_ACK => Message::Ack,
        TAG_ANGLE => {
            let vertex = r.u64()?;
            let k = r.u8()?;
            if k >= 8 {
                return Err(CodecError::Malformed("angle index out of range"));
            }
            Message::Angle { vertex, delta: Angle::new(k as i64) }
        }
        TAG_OUTCOME => {
            let vertex = r.u64()?;
            let bit = r.u8()?;
            if bit > 1 {
                return Err(CodecError::Malformed("outcome is not a bit"));
            }
            Message::Outcome { vertex, bit }
        }
        TAG_REQUEST => Message::RequestOutputs,
        TAG_OUTPUTS => Message::Outputs(r.state()?),
        t => return Err(CodecError::UnknownTag(t)),
    };
    if r.pos != payload.len() {
        return Err(CodecError::LengthMismatch { declared: len, used: r.pos });
    }
    Ok((m, 4 + len))
}
