//! Dense state vectors over labelled qubits and single-qubit preparations.
//!
//! Basis index bit `k` is the computational value of `labels[k]`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::angle::Angle;
use crate::pauli::Pauli;

/// Largest register the dense simulator will allocate.
pub const MAX_STATEVECTOR_QUBITS: usize = 16;

/// Probabilities below this are treated as impossible branches.
pub const ZERO_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("register of {actual} qubits exceeds the cap of {limit}")]
    CapExceeded { limit: usize, actual: usize },
    #[error("qubit {0} is not in the register")]
    UnknownQubit(usize),
    #[error("qubit {0} already in the register")]
    DuplicateQubit(usize),
    #[error("outcome {outcome} on qubit {qubit} has probability zero")]
    ImpossibleOutcome { qubit: usize, outcome: u8 },
    #[error("registers hold different qubits")]
    LabelMismatch,
}

/// Single-qubit preparations used by patterns and traps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalState {
    Zero,
    One,
    /// `|+_θ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2`; θ = 0, π/2, π, 3π/2 are |+⟩, |+i⟩, |−⟩, |−i⟩.
    PlusTheta(Angle),
}

impl LocalState {
    pub const PLUS: LocalState = LocalState::PlusTheta(Angle::ZERO);
    pub const MINUS: LocalState = LocalState::PlusTheta(Angle::PI);
    pub const PLUS_I: LocalState = LocalState::PlusTheta(Angle::HALF_PI);
    pub const MINUS_I: LocalState = LocalState::PlusTheta(Angle::from_k(6));

    /// +1 (`plus = true`) or −1 eigenstate of a non-identity Pauli.
    pub fn eigenstate(p: Pauli, plus: bool) -> Option<LocalState> {
        Some(match (p, plus) {
            (Pauli::I, _) => return None,
            (Pauli::X, true) => LocalState::PLUS,
            (Pauli::X, false) => LocalState::MINUS,
            (Pauli::Y, true) => LocalState::PLUS_I,
            (Pauli::Y, false) => LocalState::MINUS_I,
            (Pauli::Z, true) => LocalState::Zero,
            (Pauli::Z, false) => LocalState::One,
        })
    }

    pub fn amplitudes(self) -> [Complex64; 2] {
        const H: f64 = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            LocalState::Zero => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            LocalState::One => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            LocalState::PlusTheta(a) => {
                let (re, im) = a.phase();
                [Complex64::new(H, 0.0), Complex64::new(H * re, H * im)]
            }
        }
    }

    pub fn is_clifford(self) -> bool {
        match self {
            LocalState::PlusTheta(a) => a.is_clifford(),
            _ => true,
        }
    }
}

/// Tensor product of single-qubit preparations keyed by vertex.
pub type ProductState = BTreeMap<usize, LocalState>;

/// Pure state on an ordered list of labelled qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    labels: Vec<usize>,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// The zero-qubit state with amplitude 1.
    pub fn scalar() -> QuantumState {
        QuantumState { labels: Vec::new(), amps: vec![Complex64::new(1.0, 0.0)] }
    }

    pub fn from_amplitudes(labels: Vec<usize>, amps: Vec<Complex64>) -> Result<QuantumState, StateError> {
        if labels.len() > MAX_STATEVECTOR_QUBITS {
            return Err(StateError::CapExceeded { limit: MAX_STATEVECTOR_QUBITS, actual: labels.len() });
        }
        assert_eq!(amps.len(), 1 << labels.len(), "amplitude count must be 2^qubits");
        let mut seen = alloc::collections::BTreeSet::new();
        for &l in &labels {
            if !seen.insert(l) {
                return Err(StateError::DuplicateQubit(l));
            }
        }
        Ok(QuantumState { labels, amps })
    }

    pub fn product(state: &ProductState) -> Result<QuantumState, StateError> {
        let mut s = QuantumState::scalar();
        for (&v, &ls) in state {
            s.push_qubit(v, ls)?;
        }
        Ok(s)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    fn pos(&self, q: usize) -> Result<usize, StateError> {
        self.labels.iter().position(|&l| l == q).ok_or(StateError::UnknownQubit(q))
    }

    /// Appends a fresh qubit as the new most significant bit.
    pub fn push_qubit(&mut self, label: usize, ls: LocalState) -> Result<(), StateError> {
        if self.labels.contains(&label) {
            return Err(StateError::DuplicateQubit(label));
        }
        if self.labels.len() + 1 > MAX_STATEVECTOR_QUBITS {
            return Err(StateError::CapExceeded { limit: MAX_STATEVECTOR_QUBITS, actual: self.labels.len() + 1 });
        }
        let [a0, a1] = ls.amplitudes();
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        amps.extend(self.amps.iter().map(|&x| x * a0));
        amps.extend(self.amps.iter().map(|&x| x * a1));
        self.amps = amps;
        self.labels.push(label);
        Ok(())
    }

    /// Tensor product; labels must be disjoint.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState, StateError> {
        if let Some(&l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(StateError::DuplicateQubit(l));
        }
        let total = self.labels.len() + other.labels.len();
        if total > MAX_STATEVECTOR_QUBITS {
            return Err(StateError::CapExceeded { limit: MAX_STATEVECTOR_QUBITS, actual: total });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for &b in &other.amps {
            amps.extend(self.amps.iter().map(|&a| a * b));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(QuantumState { labels, amps })
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<(), StateError> {
        let bit = 1usize << self.pos(q)?;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<(), StateError> {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [[h, h], [h, -h]])
    }

    /// `Z(θ) = diag(1, e^{iθ})`.
    pub fn apply_phase(&mut self, q: usize, theta: Angle) -> Result<(), StateError> {
        if theta == Angle::ZERO {
            return self.pos(q).map(|_| ());
        }
        let (re, im) = theta.phase();
        let ph = Complex64::new(re, im);
        let bit = 1usize << self.pos(q)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= ph;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) -> Result<(), StateError> {
        let bit = 1usize << self.pos(q)?;
        if p.has_z() {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a = -*a;
                }
            }
        }
        if p.has_x() {
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    self.amps.swap(i, i | bit);
                }
            }
        }
        if p == Pauli::Y {
            // Y = i·X·Z.
            for a in self.amps.iter_mut() {
                *a *= Complex64::new(0.0, 1.0);
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), StateError> {
        let mask = (1usize << self.pos(a)?) | (1usize << self.pos(b)?);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    /// Probability that qubit `q` reads `0` in the computational basis.
    pub fn prob_zero(&self, q: usize) -> Result<f64, StateError> {
        let bit = 1usize << self.pos(q)?;
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & bit == 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Projects qubit `q` onto `outcome`, renormalises, and removes it.
    /// Returns the probability of the outcome before projection.
    pub fn measure_remove(&mut self, q: usize, outcome: u8) -> Result<f64, StateError> {
        let p = self.pos(q)?;
        let bit = 1usize << p;
        let want = if outcome & 1 == 1 { bit } else { 0 };
        let low = bit - 1;
        let mut kept = Vec::with_capacity(self.amps.len() / 2);
        let mut norm = 0.0;
        for i in 0..self.amps.len() / 2 {
            let full = (i & low) | ((i & !low) << 1) | want;
            let a = self.amps[full];
            norm += a.norm_sqr();
            kept.push(a);
        }
        if norm < ZERO_PROBABILITY {
            return Err(StateError::ImpossibleOutcome { qubit: q, outcome });
        }
        let scale = 1.0 / libm::sqrt(norm);
        for a in kept.iter_mut() {
            *a *= scale;
        }
        self.amps = kept;
        self.labels.remove(p);
        Ok(norm)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Reorders qubits so that `labels` becomes the register order.
    pub fn permuted(&self, labels: &[usize]) -> Result<QuantumState, StateError> {
        if labels.len() != self.labels.len() {
            return Err(StateError::LabelMismatch);
        }
        let mut src_pos = Vec::with_capacity(labels.len());
        for &l in labels {
            src_pos.push(self.pos(l).map_err(|_| StateError::LabelMismatch)?);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, amp) in amps.iter_mut().enumerate() {
            let mut i = 0usize;
            for (k, &sp) in src_pos.iter().enumerate() {
                if j >> k & 1 == 1 {
                    i |= 1 << sp;
                }
            }
            *amp = self.amps[i];
        }
        Ok(QuantumState { labels: labels.to_vec(), amps })
    }

    /// `|⟨self|other⟩|²`, matching qubits by label.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64, StateError> {
        let o = other.permuted(&self.labels)?;
        let ip: Complex64 = self.amps.iter().zip(&o.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(ip.norm_sqr())
    }
}
