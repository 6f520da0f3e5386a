//! Exact dual simplex for covering LPs with incremental row addition.
//!
//! Solves `min c·x` subject to rows `a·x >= b` and `x >= 0` with `c >= 0`.
//! Because the costs are nonnegative the all-slack basis is dual feasible
//! from the start, and stays so when a cutting plane is appended, so every
//! re-solve warm-starts from the previous optimal basis.
//!
//! Pivoting uses the dual Bland rule (leaving row: infeasible row whose basic
//! variable has the smallest index; entering column: minimum ratio, ties to
//! the smallest index), which cannot cycle.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    PivotLimit,
}

#[derive(Clone, Debug)]
pub struct DualSimplex {
    structural: usize,
    /// Row `r` reads `Σ_j rows[r][j] v_j = rhs[r]` with `v_{basis[r]}` as
    /// its unit column.
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Reduced costs over all columns.
    reduced: Vec<Rational>,
    objective: Rational,
    pivots: u64,
}

impl DualSimplex {
    pub fn new(costs: Vec<Rational>) -> Result<Self> {
        if let Some(j) = costs.iter().position(|c| c.is_negative()) {
            return Err(Error::invalid(format!("costs[{j}]"), "must be nonnegative"));
        }
        Ok(DualSimplex {
            structural: costs.len(),
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            is_basic: vec![false; costs.len()],
            reduced: costs,
            objective: Rational::zero(),
            pivots: 0,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Appends `Σ coeffs · x >= rhs` (stored as `-a·x + s = -b`) and brings
    /// it into canonical form against the current basis.
    pub fn add_row(&mut self, coeffs: &[(usize, Rational)], rhs: Rational) {
        for row in &mut self.rows {
            row.push(Rational::zero());
        }
        let width = self.reduced.len() + 1;
        let mut row = vec![Rational::zero(); width];
        for (j, a) in coeffs {
            assert!(*j < self.structural, "coefficient on unknown column {j}");
            row[*j] -= a;
        }
        row[width - 1] = Rational::one();
        let mut b = -rhs;
        for (r, &bv) in self.basis.iter().enumerate() {
            if row[bv].is_zero() {
                continue;
            }
            let f = row[bv].clone();
            for (dst, src) in row.iter_mut().zip(&self.rows[r]) {
                if !src.is_zero() {
                    *dst -= &f * src;
                }
            }
            b -= &f * &self.rhs[r];
        }
        self.reduced.push(Rational::zero());
        self.is_basic.push(true);
        self.basis.push(width - 1);
        self.rows.push(row);
        self.rhs.push(b);
    }

    /// Runs dual simplex pivots until optimal, infeasible, or `max_pivots`
    /// further pivots have been made.
    pub fn solve(&mut self, max_pivots: u64) -> LpStatus {
        let mut done = 0;
        loop {
            let leaving = (0..self.rows.len())
                .filter(|&r| self.rhs[r].is_negative())
                .min_by_key(|&r| self.basis[r]);
            let Some(r) = leaving else {
                return LpStatus::Optimal;
            };
            if done == max_pivots {
                return LpStatus::PivotLimit;
            }
            let mut best: Option<(usize, Rational)> = None;
            for (j, t) in self.rows[r].iter().enumerate() {
                if self.is_basic[j] || !t.is_negative() {
                    continue;
                }
                let ratio = &self.reduced[j] / -t;
                if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
                    best = Some((j, ratio));
                }
            }
            let Some((j, _)) = best else {
                return LpStatus::Infeasible;
            };
            self.pivot(r, j);
            done += 1;
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for k in 0..self.rows.len() {
            if k == r || self.rows[k][j].is_zero() {
                continue;
            }
            let f = self.rows[k][j].clone();
            for (dst, src) in self.rows[k].iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= &f * src;
                }
            }
            self.rhs[k] -= &f * &pivot_rhs;
        }
        if !self.reduced[j].is_zero() {
            let f = self.reduced[j].clone();
            for (dst, src) in self.reduced.iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= &f * src;
                }
            }
            self.objective += &f * &pivot_rhs;
        }
        let old = self.basis[r];
        self.is_basic[old] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Current primal values of the structural variables.
    pub fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }

    pub fn objective(&self) -> &Rational {
        &self.objective
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn single_cover_row() {
        // min 3x + 2y  s.t. x + y >= 1
        let mut lp = DualSimplex::new(vec![int(3), int(2)]).unwrap();
        lp.add_row(&[(0, int(1)), (1, int(1))], int(1));
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert_eq!(lp.solution(), vec![int(0), int(1)]);
        assert_eq!(*lp.objective(), int(2));
    }

    #[test]
    fn warm_start_after_cut() {
        // min x + y  s.t. 2x + y >= 2, then x + 2y >= 2 → (2/3, 2/3)
        let mut lp = DualSimplex::new(vec![int(1), int(1)]).unwrap();
        lp.add_row(&[(0, int(2)), (1, int(1))], int(2));
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert_eq!(*lp.objective(), int(1));
        lp.add_row(&[(0, int(1)), (1, int(2))], int(2));
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert_eq!(lp.solution(), vec![ratio(2, 3), ratio(2, 3)]);
        assert_eq!(*lp.objective(), ratio(4, 3));
    }

    #[test]
    fn upper_bound_rows_make_it_infeasible() {
        let mut lp = DualSimplex::new(vec![int(1)]).unwrap();
        lp.add_row(&[(0, int(-1))], int(-1));
        lp.add_row(&[(0, int(1))], int(2));
        assert_eq!(lp.solve(100), LpStatus::Infeasible);
    }

    #[test]
    fn zero_rhs_is_already_optimal() {
        let mut lp = DualSimplex::new(vec![int(1)]).unwrap();
        lp.add_row(&[(0, int(1))], int(0));
        assert_eq!(lp.solve(0), LpStatus::Optimal);
        assert_eq!(lp.pivots(), 0);
    }

    #[test]
    fn negative_costs_rejected() {
        assert!(DualSimplex::new(vec![int(-1)]).is_err());
    }
}
