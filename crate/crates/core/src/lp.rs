//! Dense exact simplex for packing-form linear programs.
//!
//! Solves `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`, so the slack basis is
//! feasible and no phase one is needed. Pivoting follows Bland's rule, which
//! terminates on the heavily degenerate programs produced by trap design.
//! Dual values are read from the slack columns of the final objective row.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint matrix has {rows} rows but {rhs} right-hand sides")]
    RhsLength { rows: usize, rhs: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },
    #[error("right-hand side {row} is negative")]
    NegativeRhs { row: usize },
    #[error("objective is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    /// Optimal primal point, one entry per column of `A`.
    pub primal: Vec<Rational>,
    /// Optimal dual point, one entry per row of `A`.
    pub dual: Vec<Rational>,
    /// Some non-basic column has zero reduced cost at the optimum.
    pub alternative_optima: bool,
    pub pivots: usize,
}

pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(LpError::RhsLength { rows: m, rhs: b.len() });
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(LpError::RowLength { row: i, len: row.len(), expected: n });
        }
        if b[i].is_negative() {
            return Err(LpError::NegativeRhs { row: i });
        }
    }
    let width = n + m;
    let mut t: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.resize(width, Rational::zero());
            r[n + i] = crate::rational::one();
            r
        })
        .collect();
    let mut rhs: Vec<Rational> = b.to_vec();
    let mut obj: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    obj.resize(width, Rational::zero());
    let mut value = Rational::zero();
    let mut basis: Vec<usize> = (n..width).collect();
    let mut pivots = 0usize;

    loop {
        let Some(enter) = obj.iter().position(|v| v.is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &rhs[i] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else { return Err(LpError::Unbounded) };
        pivot(&mut t, &mut rhs, &mut obj, &mut value, row, enter);
        basis[row] = enter;
        pivots += 1;
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            primal[bv] = rhs[i].clone();
        }
    }
    let dual = obj[n..].to_vec();
    let mut is_basic = vec![false; width];
    for &bv in &basis {
        is_basic[bv] = true;
    }
    let alternative_optima = (0..width).any(|j| !is_basic[j] && obj[j].is_zero());
    Ok(LpSolution { value, primal, dual, alternative_optima, pivots })
}

fn pivot(
    t: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    obj: &mut [Rational],
    value: &mut Rational,
    row: usize,
    col: usize,
) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        if !v.is_zero() {
            *v /= &p;
        }
    }
    rhs[row] /= &p;
    let pivot_row = t[row].clone();
    let pivot_rhs = rhs[row].clone();
    let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for &j in &nz {
            r[j] -= &f * &pivot_row[j];
        }
        rhs[i] -= &f * &pivot_rhs;
    }
    if !obj[col].is_zero() {
        let f = obj[col].clone();
        for &j in &nz {
            obj[j] -= &f * &pivot_row[j];
        }
        *value -= &f * &pivot_rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_program() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  →  36 at (2, 6).
        let a = vec![q(&[1, 0]), q(&[0, 2]), q(&[3, 2])];
        let s = maximize(&a, &q(&[4, 12, 18]), &q(&[3, 5])).unwrap();
        assert_eq!(s.value, int(36));
        assert_eq!(s.primal, q(&[2, 6]));
        // Dual: (0, 3/2, 1), and b·y equals the optimum.
        assert_eq!(s.dual, vec![int(0), ratio(3, 2), int(1)]);
    }

    #[test]
    fn unbounded_detected() {
        let a = vec![q(&[1, -1])];
        assert_eq!(maximize(&a, &q(&[1]), &q(&[1, 1])), Err(LpError::Unbounded));
    }

    #[test]
    fn negative_rhs_rejected() {
        let a = vec![q(&[1])];
        assert_eq!(maximize(&a, &q(&[-1]), &q(&[1])), Err(LpError::NegativeRhs { row: 0 }));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let a = vec![
            vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)],
            vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)],
            vec![int(0), int(0), int(1), int(0)],
        ];
        let b = q(&[0, 0, 1]);
        let c = vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6)];
        let s = maximize(&a, &b, &c).unwrap();
        assert_eq!(s.value, ratio(1, 20));
    }
}
