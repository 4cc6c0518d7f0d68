//! Dense bounded-variable primal simplex for packing linear programs
//!
//! ```text
//! maximize cᵀx  subject to  A x ≤ b,  0 ⪯ x ⪯ u
//! ```
//!
//! with `A` arbitrary and `b ⪰ 0`. The origin is feasible, so the all-slack
//! basis starts the method and no phase one is needed. Upper bounds are
//! handled implicitly (nonbasic variables sit at either bound), which keeps
//! the tableau at one row per packing constraint.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::math::{dot, Matrix};

const PIVOT_TOL: f64 = 1e-11;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct PackingLp {
    a: Matrix,
    b: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

impl PackingLp {
    pub fn new(a: Matrix, b: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(a.rows(), b.len())?;
        check_len(a.cols(), upper.len())?;
        if b.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid!("right-hand side must be finite and nonnegative"));
        }
        if upper.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(invalid!("variable upper bounds must be nonnegative"));
        }
        if a.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(invalid!("constraint matrix must be finite"));
        }
        Ok(Self { a, b, upper })
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.num_vars()
            && x.iter().zip(&self.upper).all(|(v, u)| *v >= -tol && *v <= u + tol)
            && (0..self.num_rows()).all(|r| dot(self.a.row(r), x) <= self.b[r] + tol)
    }

    pub fn maximize(&self, c: &[f64]) -> Result<LpSolution> {
        check_len(self.num_vars(), c.len())?;
        Tableau::new(self, c).solve()
    }
}

struct Tableau {
    n: usize,
    width: usize,
    rows: Vec<Vec<f64>>,
    /// current values of the basic variables
    xb: Vec<f64>,
    basis: Vec<usize>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    reduced: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    tol: f64,
}

impl Tableau {
    fn new(lp: &PackingLp, c: &[f64]) -> Self {
        let (p, n) = (lp.num_rows(), lp.num_vars());
        let width = n + p;
        let rows = (0..p)
            .map(|r| {
                let mut row = vec![0.0; width];
                row[..n].copy_from_slice(lp.a.row(r));
                row[n + r] = 1.0;
                row
            })
            .collect();
        let mut upper = lp.upper.clone();
        upper.extend(core::iter::repeat_n(f64::INFINITY, p));
        let mut cost = c.to_vec();
        cost.extend(core::iter::repeat_n(0.0, p));
        let mut is_basic = vec![false; width];
        is_basic[n..].iter_mut().for_each(|b| *b = true);
        let scale = c.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        Self {
            n,
            width,
            rows,
            xb: lp.b.clone(),
            basis: (n..width).collect(),
            at_upper: vec![false; width],
            is_basic,
            reduced: cost.clone(),
            upper,
            cost,
            tol: 1e-11 * scale,
        }
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.width {
            if self.is_basic[j] || self.upper[j] == 0.0 {
                continue;
            }
            let d = self.reduced[j];
            let dir = if !self.at_upper[j] && d > self.tol {
                1.0
            } else if self.at_upper[j] && d < -self.tol {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(b, _)| d.abs() > self.reduced[b].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    fn solve(mut self) -> Result<LpSolution> {
        let limit = 50 * self.width + 1000;
        let mut pivots = 0;
        let mut streak = 0;
        while let Some((j, dir)) = self.entering(streak >= DEGENERATE_STREAK) {
            pivots += 1;
            if pivots > limit {
                return Err(Error::PivotLimit(limit));
            }
            // ratio test; `None` as the row means the entering variable flips bounds
            let mut step = self.upper[j];
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                let alpha = dir * self.rows[r][j];
                let limit_r = if alpha > PIVOT_TOL {
                    self.xb[r].max(0.0) / alpha
                } else if alpha < -PIVOT_TOL && self.upper[self.basis[r]].is_finite() {
                    (self.upper[self.basis[r]] - self.xb[r]).max(0.0) / -alpha
                } else {
                    continue;
                };
                let better = match leave {
                    _ if limit_r < step - 1e-15 => true,
                    Some(l) if limit_r <= step + 1e-15 => {
                        if streak >= DEGENERATE_STREAK {
                            self.basis[r] < self.basis[l]
                        } else {
                            self.rows[r][j].abs() > self.rows[l][j].abs()
                        }
                    }
                    _ => false,
                };
                if better {
                    step = limit_r;
                    leave = Some(r);
                }
            }
            if step.is_infinite() {
                return Err(Error::Unbounded);
            }
            streak = if step <= 1e-14 { streak + 1 } else { 0 };
            for r in 0..self.rows.len() {
                self.xb[r] -= dir * self.rows[r][j] * step;
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some(r) => {
                    let start = if self.at_upper[j] { self.upper[j] } else { 0.0 };
                    let out = self.basis[r];
                    self.at_upper[out] = dir * self.rows[r][j] < 0.0;
                    self.is_basic[out] = false;
                    self.is_basic[j] = true;
                    self.at_upper[j] = false;
                    self.basis[r] = j;
                    self.xb[r] = start + dir * step;
                    self.pivot(r, j);
                }
            }
        }
        let mut x = vec![0.0; self.n];
        for (j, xj) in x.iter_mut().enumerate() {
            if !self.is_basic[j] && self.at_upper[j] {
                *xj = self.upper[j];
            }
        }
        for (r, &bj) in self.basis.iter().enumerate() {
            if bj < self.n {
                x[bj] = self.xb[r].clamp(0.0, self.upper[bj]);
            }
        }
        let value = dot(&self.cost[..self.n], &x);
        Ok(LpSolution { x, value, pivots })
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = 1.0 / self.rows[r][j];
        self.rows[r].iter_mut().for_each(|v| *v *= inv);
        let pivot_row = core::mem::take(&mut self.rows[r]);
        for (q, row) in self.rows.iter_mut().enumerate() {
            if q == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = self.reduced[j];
        self.reduced.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
        self.rows[r] = pivot_row;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(rows: &[Vec<f64>], b: Vec<f64>, u: Vec<f64>) -> PackingLp {
        PackingLp::new(Matrix::from_rows(rows).unwrap(), b, u).unwrap()
    }

    #[test]
    fn fractional_knapsack() {
        // max 6x + 5y + 4z s.t. 3x + 5y + 4z ≤ 6, x,y,z ∈ [0,1]
        let p = lp(&[vec![3.0, 5.0, 4.0]], vec![6.0], vec![1.0; 3]);
        let s = p.maximize(&[6.0, 5.0, 4.0]).unwrap();
        // ratios 2, 1, 1: take x, then 3/5 of y (ties resolved either way give 9)
        assert!((s.value - 9.0).abs() < 1e-12, "{s:?}");
        assert!(p.is_feasible(&s.x, 1e-12));
    }

    #[test]
    fn two_constraints() {
        // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
        let p = lp(&[vec![1.0, 1.0], vec![1.0, 3.0]], vec![4.0, 6.0], vec![3.0, f64::INFINITY]);
        let s = p.maximize(&[3.0, 2.0]).unwrap();
        assert!((s.value - 11.0).abs() < 1e-12);
        assert!((s.x[0] - 3.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_objective_stays_at_origin() {
        let p = lp(&[vec![1.0, 1.0]], vec![1.0], vec![1.0, 1.0]);
        let s = p.maximize(&[-1.0, 0.0]).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.pivots, 0);
    }

    #[test]
    fn unbounded_detected() {
        let p = lp(&[vec![1.0, -1.0]], vec![1.0], vec![f64::INFINITY, f64::INFINITY]);
        assert_eq!(p.maximize(&[1.0, 1.0]), Err(Error::Unbounded));
    }
}
