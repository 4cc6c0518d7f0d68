use alloc::vec::Vec;

use crate::error::{check_len, invalid, Result};
use crate::math::{dot, Matrix};

/// `H(x) = ½ xᵀ S x + hᵀ x` with `S` the symmetric part of the supplied matrix.
///
/// The function is DR-submodular iff `S` is element-wise nonpositive and
/// monotone on its domain box iff `S x + h ⪰ 0` there.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticDr {
    hessian: Matrix,
    linear: Vec<f64>,
    domain: Vec<f64>,
}

impl QuadraticDr {
    /// Builds the quadratic with an unbounded domain. Non-symmetric matrices
    /// are replaced by their symmetric part, which leaves the value unchanged.
    pub fn new(hessian: Matrix, linear: Vec<f64>) -> Result<Self> {
        let m = linear.len();
        if hessian.rows() != m || hessian.cols() != m {
            return Err(invalid!("hessian is {}x{} but linear term has length {}", hessian.rows(), hessian.cols(), m));
        }
        if hessian.as_slice().iter().chain(&linear).any(|v| !v.is_finite()) {
            return Err(invalid!("quadratic coefficients must be finite"));
        }
        let mut sym = hessian.clone();
        for r in 0..m {
            for c in 0..m {
                sym.set(r, c, 0.5 * (hessian.get(r, c) + hessian.get(c, r)));
            }
        }
        Ok(Self { hessian: sym, linear, domain: alloc::vec![f64::INFINITY; m] })
    }

    pub fn with_domain(mut self, domain: Vec<f64>) -> Result<Self> {
        check_len(self.dim(), domain.len())?;
        if domain.iter().any(|&b| b.is_nan() || b < 0.0) {
            return Err(invalid!("domain box bounds must be nonnegative"));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn domain(&self) -> &[f64] {
        &self.domain
    }

    pub fn is_elementwise_nonpositive(&self) -> bool {
        self.hessian.as_slice().iter().all(|&v| v <= 0.0)
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        (0..self.dim()).map(|t| x[t] * (0.5 * dot(self.hessian.row(t), x) + self.linear[t])).sum()
    }

    pub(crate) fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|t| self.gradient_coord(x, t)).collect()
    }

    #[inline]
    pub(crate) fn gradient_coord(&self, x: &[f64], t: usize) -> f64 {
        dot(self.hessian.row(t), x) + self.linear[t]
    }
}
