//! Pauli twirling over small registers.
//!
//! Averaging `P† Q P ρ P† Q'† P` over all Pauli words `P` cancels every
//! cross term `Q ≠ Q'`, which is why a deviating server reduces to a
//! probabilistic mixture of Pauli deviations.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::pauli::{Pauli, PauliWord};

/// Row-major `d × d` complex matrix.
pub type Matrix = Vec<Complex64>;

fn dim(m: &Matrix) -> usize {
    let d = (0..=m.len()).find(|d| d * d >= m.len()).unwrap_or(0);
    assert_eq!(d * d, m.len(), "matrix must be square");
    d
}

fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = dim(a);
    let mut c = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}

fn dagger(a: &Matrix) -> Matrix {
    let d = dim(a);
    let mut c = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            c[j * d + i] = a[i * d + j].conj();
        }
    }
    c
}

/// Dense matrix of a Pauli word; site `k` acts on bit `k` of the basis index.
pub fn pauli_matrix(w: &PauliWord) -> Matrix {
    let n = w.len();
    let d = 1usize << n;
    let phase = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)][w.phase as usize];
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for col in 0..d {
        let mut row = col;
        let mut amp = phase;
        for (k, &p) in w.ops.iter().enumerate() {
            let bit = col >> k & 1;
            match p {
                Pauli::I => {}
                Pauli::X => row ^= 1 << k,
                Pauli::Z => {
                    if bit == 1 {
                        amp = -amp;
                    }
                }
                Pauli::Y => {
                    row ^= 1 << k;
                    amp *= if bit == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
                }
            }
        }
        m[row * d + col] = amp;
    }
    m
}

/// All `4^n` unsigned Pauli words on `n` sites.
pub fn all_words(n: usize) -> Vec<PauliWord> {
    (0..1usize << (2 * n))
        .map(|code| PauliWord::new(0, (0..n).map(|k| Pauli::ALL[code >> (2 * k) & 3]).collect()))
        .collect()
}

/// `Σ_P P† Q P ρ P† Q'† P` over every Pauli word `P`.
pub fn twirl_sum(rho: &Matrix, q: &PauliWord, q2: &PauliWord) -> Matrix {
    assert_eq!(q.len(), q2.len(), "Pauli words must act on the same register");
    let n = q.len();
    assert_eq!(dim(rho), 1 << n, "state dimension must match the words");
    let qm = pauli_matrix(q);
    let q2d = dagger(&pauli_matrix(q2));
    let mut acc = vec![Complex64::new(0.0, 0.0); rho.len()];
    for p in all_words(n) {
        let pm = pauli_matrix(&p);
        let pd = dagger(&pm);
        let left = mul(&mul(&pd, &qm), &pm);
        let right = mul(&mul(&pd, &q2d), &pm);
        let term = mul(&mul(&left, rho), &right);
        for (a, t) in acc.iter_mut().zip(term) {
            *a += t;
        }
    }
    acc
}

/// Largest entry modulus of [`twirl_sum`]; zero up to rounding when `Q ≠ Q'`.
pub fn twirl_residual(rho: &Matrix, q: &PauliWord, q2: &PauliWord) -> f64 {
    let r = twirl_sum(rho, q, q2).iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    libm::sqrt(r)
}

/// `|ψ⟩⟨ψ|` from amplitudes.
pub fn density(psi: &[Complex64]) -> Matrix {
    let d = psi.len();
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            m[i * d + j] = psi[i] * psi[j].conj();
        }
    }
    m
}
