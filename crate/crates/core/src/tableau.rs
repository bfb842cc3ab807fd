//! Stabiliser tableau (destabiliser form) for Clifford-only simulation.
//!
//! Rows `0..n` are destabilisers, rows `n..2n` stabilisers, row `2n` scratch.
//! Each row is a Pauli word stored as X and Z bit-planes plus a sign bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::pauli::Pauli;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<u8>,
}

/// Result of a single-qubit Z measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub bit: u8,
    /// The outcome was uniformly random before it was fixed.
    pub random: bool,
}

impl Tableau {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Tableau {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![0; rows] };
        for i in 0..n {
            t.set_x(i, i, true);
            t.set_z(n + i, i, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn get_x(&self, row: usize, q: usize) -> bool {
        self.x[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn get_z(&self, row: usize, q: usize) -> bool {
        self.z[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.x[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    #[inline]
    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.z[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    pub fn h(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (xb, zb) = (self.get_x(row, q), self.get_z(row, q));
            self.r[row] ^= (xb & zb) as u8;
            self.set_x(row, q, zb);
            self.set_z(row, q, xb);
        }
    }

    pub fn s(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (xb, zb) = (self.get_x(row, q), self.get_z(row, q));
            self.r[row] ^= (xb & zb) as u8;
            self.set_z(row, q, zb ^ xb);
        }
    }

    pub fn sdg(&mut self, q: usize) {
        self.s(q);
        self.s(q);
        self.s(q);
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for row in 0..2 * self.n {
            let (xc, zc, xt, zt) = (self.get_x(row, c), self.get_z(row, c), self.get_x(row, t), self.get_z(row, t));
            self.r[row] ^= (xc & zt & !(xt ^ zc)) as u8;
            self.set_x(row, t, xt ^ xc);
            self.set_z(row, c, zc ^ zt);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    pub fn pauli(&mut self, q: usize, p: Pauli) {
        for row in 0..2 * self.n {
            let flip = (p.has_x() && self.get_z(row, q)) ^ (p.has_z() && self.get_x(row, q));
            self.r[row] ^= flip as u8;
        }
    }

    /// Phase exponent contribution of multiplying single-qubit Paulis.
    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 as i32 - x2 as i32,
            (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
            (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
        }
    }

    /// Row `h` ← row `i` · row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut total = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for q in 0..self.n {
            total += Self::g(self.get_x(i, q), self.get_z(i, q), self.get_x(h, q), self.get_z(h, q));
        }
        self.r[h] = (total.rem_euclid(4) == 2) as u8;
        for w in 0..self.words {
            self.x[h * self.words + w] ^= self.x[i * self.words + w];
            self.z[h * self.words + w] ^= self.z[i * self.words + w];
        }
    }

    fn clear_row(&mut self, row: usize) {
        for w in 0..self.words {
            self.x[row * self.words + w] = 0;
            self.z[row * self.words + w] = 0;
        }
        self.r[row] = 0;
    }

    /// Deterministic Z outcome of qubit `q`, or `None` when it is random.
    pub fn deterministic_outcome(&mut self, q: usize) -> Option<u8> {
        let n = self.n;
        if (n..2 * n).any(|p| self.get_x(p, q)) {
            return None;
        }
        let scratch = 2 * n;
        self.clear_row(scratch);
        for i in 0..n {
            if self.get_x(i, q) {
                self.rowsum(scratch, i + n);
            }
        }
        Some(self.r[scratch])
    }

    /// Measures qubit `q` in the Z basis; `pick` supplies the bit when the
    /// outcome is random and is not called otherwise.
    pub fn measure(&mut self, q: usize, pick: impl FnOnce() -> u8) -> Measurement {
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&p| self.get_x(p, q)) else {
            let bit = self.deterministic_outcome(q).expect("no stabiliser anticommutes");
            return Measurement { bit, random: false };
        };
        for i in 0..2 * n {
            if i != p && self.get_x(i, q) {
                self.rowsum(i, p);
            }
        }
        let (dst, src) = (p - n, p);
        for w in 0..self.words {
            self.x[dst * self.words + w] = self.x[src * self.words + w];
            self.z[dst * self.words + w] = self.z[src * self.words + w];
        }
        self.r[dst] = self.r[src];
        self.clear_row(p);
        self.set_z(p, q, true);
        let bit = pick() & 1;
        self.r[p] = bit;
        Measurement { bit, random: true }
    }

    /// Projects onto `bit`; `None` if that outcome is impossible, otherwise
    /// whether the outcome was random (probability 1/2) or certain.
    pub fn postselect(&mut self, q: usize, bit: u8) -> Option<bool> {
        if let Some(b) = self.deterministic_outcome(q) {
            return (b == bit & 1).then_some(false);
        }
        Some(self.measure(q, || bit).random)
    }

    /// Measures the parity observable `∏ Z_q` over `qubits`.
    pub fn measure_z_parity(&mut self, qubits: &[usize], pick: impl FnOnce() -> u8) -> Measurement {
        let Some((&first, rest)) = qubits.split_first() else {
            return Measurement { bit: 0, random: false };
        };
        for &q in rest {
            self.cnot(q, first);
        }
        let m = self.measure(first, pick);
        for &q in rest.iter().rev() {
            self.cnot(q, first);
        }
        m
    }

    /// Stabiliser generator `i` as `(sign bit, Paulis)`.
    pub fn stabiliser(&self, i: usize) -> (u8, Vec<Pauli>) {
        let row = self.n + i;
        (self.r[row], (0..self.n).map(|q| Pauli::from_bits(self.get_x(row, q), self.get_z(row, q))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_pair_correlations() {
        let mut t = Tableau::new(2);
        t.h(0);
        t.cnot(0, 1);
        let m0 = t.measure(0, || 1);
        assert!(m0.random);
        assert_eq!(t.deterministic_outcome(1), Some(1));
        assert_eq!(t.measure(1, || 0), Measurement { bit: 1, random: false });
    }

    #[test]
    fn paulis_flip_outcomes() {
        let mut t = Tableau::new(1);
        t.pauli(0, Pauli::X);
        assert_eq!(t.deterministic_outcome(0), Some(1));
        t.pauli(0, Pauli::Z);
        assert_eq!(t.deterministic_outcome(0), Some(1));
        t.pauli(0, Pauli::Y);
        assert_eq!(t.deterministic_outcome(0), Some(0));
    }

    #[test]
    fn phase_gates_rotate_plus() {
        // S²|+⟩ = |−⟩, measured after H gives 1.
        let mut t = Tableau::new(1);
        t.h(0);
        t.s(0);
        t.s(0);
        t.h(0);
        assert_eq!(t.deterministic_outcome(0), Some(1));
        let mut u = Tableau::new(1);
        u.h(0);
        u.s(0);
        u.sdg(0);
        u.h(0);
        assert_eq!(u.deterministic_outcome(0), Some(0));
    }

    #[test]
    fn parity_of_ghz_is_deterministic() {
        let mut t = Tableau::new(3);
        t.h(0);
        t.cnot(0, 1);
        t.cnot(1, 2);
        assert_eq!(t.measure_z_parity(&[0, 1], || 1), Measurement { bit: 0, random: false });
        assert_eq!(t.measure_z_parity(&[0, 2], || 1), Measurement { bit: 0, random: false });
        assert!(t.measure_z_parity(&[0], || 1).random);
        assert_eq!(t.postselect(2, 0), None);
        assert_eq!(t.postselect(2, 1), Some(false));
    }

    #[test]
    fn wide_register_crosses_word_boundary() {
        let mut t = Tableau::new(70);
        t.h(3);
        t.cnot(3, 68);
        t.measure(3, || 1);
        assert_eq!(t.deterministic_outcome(68), Some(1));
    }
}
