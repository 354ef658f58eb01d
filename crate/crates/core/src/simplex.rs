//! Exact two-phase simplex over rationals.
//!
//! Only used for finitely generated cone membership, so problems are tiny;
//! Bland's rule keeps the pivoting cycle-free without any numeric tolerance.

use crate::rational::{QMatrix, QVector, Rational};
use num_traits::{One, Signed, Zero};

/// Outcome of `maximize c·x  s.t.  A·x = b, x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, solution: QVector },
}

struct Tableau {
    // rows × (cols + 1); last column is the right-hand side
    data: Vec<QVector>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        &self.data[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.data[row][col].clone();
        for x in self.data[row].iter_mut() {
            *x /= &pivot;
        }
        for r in 0..self.data.len() {
            if r != row && !self.data[r][col].is_zero() {
                let factor = self.data[r][col].clone();
                for c in 0..=self.cols {
                    let delta = &factor * &self.data[row][c];
                    self.data[r][c] = &self.data[r][c] - delta;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Simplex iterations maximizing `objective` (a cost row indexed by
    /// column). Returns `None` when unbounded, else the optimal value.
    fn run(&mut self, objective: &mut QVector) -> Option<Rational> {
        // reduce the cost row against the current basis
        for (row, &b) in self.basis.clone().iter().enumerate() {
            if !objective[b].is_zero() {
                let factor = objective[b].clone();
                for c in 0..=self.cols {
                    let delta = &factor * &self.data[row][c];
                    objective[c] = &objective[c] - delta;
                }
            }
        }
        loop {
            // Bland: entering column = lowest index with positive reduced cost
            let Some(col) = (0..self.cols).find(|&c| objective[c].is_positive()) else {
                return Some(-objective[self.cols].clone());
            };
            // leaving row = min ratio, ties by lowest basis index (Bland)
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.data.len() {
                if self.data[r][col].is_positive() {
                    let ratio = self.rhs(r) / &self.data[r][col];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return None; // unbounded in the entering direction
            };
            self.pivot(row, col);
            let factor = objective[col].clone();
            for c in 0..=self.cols {
                let delta = &factor * &self.data[row][c];
                objective[c] = &objective[c] - delta;
            }
        }
    }
}

/// Solve `maximize c·x  s.t.  A·x = b, x ≥ 0` exactly.
pub fn maximize(a: &QMatrix, b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.height();
    let n = a.width();
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);

    // phase 1: artificial variables, rows flipped so rhs ≥ 0
    let total = n + m;
    let mut data = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: QVector = Vec::with_capacity(total + 1);
        for j in 0..n {
            let v = a.entry(i, j).clone();
            row.push(if flip { -v } else { v });
        }
        for j in 0..m {
            row.push(if i == j {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        data.push(row);
    }
    let mut tab = Tableau {
        data,
        basis: (n..total).collect(),
        cols: total,
    };

    // maximize -(sum of artificials)
    let mut phase1: QVector = vec![Rational::zero(); total + 1];
    for j in n..total {
        phase1[j] = -Rational::one();
    }
    match tab.run(&mut phase1) {
        Some(v) if v.is_zero() => {}
        _ => return LpOutcome::Infeasible,
    }

    // drive any artificial variables out of the basis; drop redundant rows
    for row in 0..tab.data.len() {
        if tab.basis[row] >= n {
            if let Some(col) = (0..n).find(|&c| !tab.data[row][c].is_zero()) {
                tab.pivot(row, col);
            }
        }
    }
    let keep: Vec<usize> = (0..tab.data.len()).filter(|&r| tab.basis[r] < n).collect();
    tab.data = keep.iter().map(|&r| tab.data[r].clone()).collect();
    tab.basis = keep.iter().map(|&r| tab.basis[r]).collect();

    // phase 2 on the original columns
    for row in tab.data.iter_mut() {
        let rhs = row.pop().expect("row has rhs");
        row.truncate(n);
        row.push(rhs);
    }
    tab.cols = n;
    let mut phase2: QVector = c.to_vec();
    phase2.push(Rational::zero());
    match tab.run(&mut phase2) {
        None => LpOutcome::Unbounded,
        Some(value) => {
            let mut solution = vec![Rational::zero(); n];
            for (row, &b) in tab.basis.iter().enumerate() {
                solution[b] = tab.rhs(row).clone();
            }
            LpOutcome::Optimal { value, solution }
        }
    }
}
