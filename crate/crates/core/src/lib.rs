//! Exact and simulation-backed machinery for trap-based verification of
//! blind measurement-based quantum computation.
//!
//! The crate is `no_std` with `alloc`. Everything here is deterministic given
//! its inputs; randomness enters only through caller-supplied [`rand::RngCore`]
//! values. IO, file formats, parallel Monte-Carlo and the command line live in
//! the companion `trapkit` crate.
//!
//! Vertex identifiers are plain `usize` values chosen by the caller. Where a
//! dense qubit index is needed the vertex's position in the sorted vertex list
//! is used.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod analysis;
pub mod angle;
pub mod compiler;
pub mod graph;
pub mod lp;
pub mod mbqc;
pub mod optimizer;
pub mod pauli;
pub mod rational;
pub mod state;
pub mod tableau;
pub mod traps;
pub mod ubqc;

pub use angle::Angle;
pub use graph::OpenGraph;
pub use pauli::{Pauli, PauliDeviation, PauliWord};
pub use rational::Rational;
