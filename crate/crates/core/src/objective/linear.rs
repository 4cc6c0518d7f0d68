use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::dot;

/// `H(x) = dᵀx` with `d ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearObjective {
    coefficients: Vec<f64>,
}

impl LinearObjective {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|&d| !d.is_finite() || d < 0.0) {
            return Err(invalid!("linear coefficients must be finite and nonnegative"));
        }
        Ok(Self { coefficients })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        dot(&self.coefficients, x)
    }
}
