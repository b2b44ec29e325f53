//! Dense two-phase simplex for small linear programs.
//!
//! Solves `max c.x` subject to `A x = b`, `x >= 0`. Pivoting follows Bland's
//! rule (lowest eligible index for both entering and leaving variables), so
//! the method terminates on degenerate problems.

use crate::error::{Error, Result};

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpFailure {
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    // (rows + 1) x (cols + 1); row `rows` is the objective, column `cols` the rhs.
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.t[r * (self.cols + 1) + c]
    }

    fn obj(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let pv = self.at(pr, pc);
        for c in 0..w {
            *self.at_mut(pr, c) /= pv;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.at(pr, c);
                *self.at_mut(r, c) -= f * v;
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations with entering columns restricted to `allowed`.
    fn optimize(&mut self, allowed: usize) -> std::result::Result<(), LpFailure> {
        loop {
            let obj = self.obj();
            let Some(pc) = (0..allowed).find(|&c| self.at(obj, c) < -LP_TOL) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > LP_TOL {
                    let ratio = self.at(r, self.cols) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - 1e-12 || ((ratio - br).abs() <= 1e-12 && self.basis[r] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                Some((_, pr, _)) => self.pivot(pr, pc),
                None => return Err(LpFailure::Unbounded),
            }
        }
    }
}

/// Maximizes `c.x` over `{x >= 0 : a x = b}`. `a` is row-major with one
/// row per constraint.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> std::result::Result<LpSolution, LpFailure> {
    let n = c.len();
    let m = a.len();
    let cols = n + m;
    let mut tab = Tableau {
        rows: m,
        cols,
        t: vec![0.0; (m + 1) * (cols + 1)],
        basis: (n..n + m).collect(),
    };
    for (r, row) in a.iter().enumerate() {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for (j, &v) in row.iter().enumerate() {
            *tab.at_mut(r, j) = sign * v;
        }
        *tab.at_mut(r, n + r) = 1.0;
        *tab.at_mut(r, cols) = sign * b[r];
    }
    // Phase 1: maximize minus the sum of artificials.
    for r in 0..m {
        for c2 in 0..n {
            let v = tab.at(r, c2);
            *tab.at_mut(m, c2) -= v;
        }
        let v = tab.at(r, cols);
        *tab.at_mut(m, cols) -= v;
    }
    tab.optimize(n)?;
    if tab.at(m, cols) < -LP_TOL {
        return Err(LpFailure::Infeasible);
    }
    // Move zero-level artificials out of the basis where possible; rows
    // with no original column left are redundant and keep theirs.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| tab.at(r, j).abs() > LP_TOL) {
                tab.pivot(r, j);
            }
        }
    }
    // Phase 2 objective in reduced form.
    for c2 in 0..=cols {
        *tab.at_mut(m, c2) = 0.0;
    }
    for (j, &cj) in c.iter().enumerate() {
        *tab.at_mut(m, j) = -cj;
    }
    for r in 0..m {
        let bcol = tab.basis[r];
        let f = tab.at(m, bcol);
        if f != 0.0 {
            for c2 in 0..=cols {
                let v = tab.at(r, c2);
                *tab.at_mut(m, c2) -= f * v;
            }
        }
    }
    tab.optimize(n)?;
    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.at(r, cols).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpSolution { x, value })
}

pub(crate) fn lp_error(f: LpFailure) -> Error {
    Error::Internal(format!("linear program reported {f:?}"))
}

pub(crate) fn maximize_or_internal(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    maximize(c, a, b).map_err(lp_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 (slacks s1..s3).
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let s = maximize(&[3.0, 5.0, 0.0, 0.0, 0.0], &a, &[4.0, 12.0, 18.0]).unwrap();
        assert!((s.value - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(maximize(&[1.0, 0.0], &a, &[1.0, 2.0]), Err(LpFailure::Infeasible));
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(maximize(&[1.0, 0.0], &a, &[0.0]), Err(LpFailure::Unbounded));
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        let s = maximize(&[1.0, 2.0], &a, &[1.0, 2.0]).unwrap();
        assert!((s.value - 2.0).abs() < 1e-9);
    }
}
