//! Monotone DR-submodular objectives.
//!
//! Every objective is normalized (`H(0) = 0`), monotone non-decreasing on
//! its domain and has an anti-tone gradient. Three families are provided:
//! non-concave quadratics with element-wise nonpositive Hessian, exact
//! multilinear extensions of small submodular set functions, and linear
//! objectives.

mod curvature;
mod linear;
mod multilinear;
mod quadratic;

use alloc::vec::Vec;

pub(crate) use curvature::odometer;
pub use curvature::{
    check_dr, estimate_alpha, estimate_alpha_with, estimate_smoothness, total_curvature, AlphaOptions, CurvatureReport,
    DrCheck, DrViolation,
};
pub use linear::LinearObjective;
pub use multilinear::{reference, Multilinear, SetFunctionTable, MAX_GROUND_SET};
pub use quadratic::QuadraticDr;

use crate::error::{check_len, Error, Result};

/// Slack allowed when checking that a point lies in the objective domain.
/// Allocations built from many `1/K` increments may exceed a bound by a few ulps.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Quadratic,
    Multilinear,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DrObjective {
    Quadratic(QuadraticDr),
    Multilinear(Multilinear),
    Linear(LinearObjective),
}

impl From<QuadraticDr> for DrObjective {
    fn from(q: QuadraticDr) -> Self {
        DrObjective::Quadratic(q)
    }
}

impl From<Multilinear> for DrObjective {
    fn from(m: Multilinear) -> Self {
        DrObjective::Multilinear(m)
    }
}

impl From<LinearObjective> for DrObjective {
    fn from(l: LinearObjective) -> Self {
        DrObjective::Linear(l)
    }
}

impl DrObjective {
    pub fn dim(&self) -> usize {
        match self {
            DrObjective::Quadratic(q) => q.dim(),
            DrObjective::Multilinear(m) => m.dim(),
            DrObjective::Linear(l) => l.dim(),
        }
    }

    pub fn kind(&self) -> ObjectiveKind {
        match self {
            DrObjective::Quadratic(_) => ObjectiveKind::Quadratic,
            DrObjective::Multilinear(_) => ObjectiveKind::Multilinear,
            DrObjective::Linear(_) => ObjectiveKind::Linear,
        }
    }

    /// Per-coordinate upper limits of the domain; `f64::INFINITY` when unbounded.
    pub fn domain_box(&self) -> Vec<f64> {
        match self {
            DrObjective::Quadratic(q) => q.domain().to_vec(),
            DrObjective::Multilinear(m) => alloc::vec![1.0; m.dim()],
            DrObjective::Linear(l) => alloc::vec![f64::INFINITY; l.dim()],
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        check_len(self.dim(), x.len())?;
        let domain = self.domain_box();
        for (coord, (&v, &hi)) in x.iter().zip(&domain).enumerate() {
            if !v.is_finite() || v < -DOMAIN_TOL || v > hi + DOMAIN_TOL {
                return Err(Error::OutsideDomain { coord, value: v });
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(match self {
            DrObjective::Quadratic(q) => q.value(x),
            DrObjective::Multilinear(m) => m.value(x),
            DrObjective::Linear(l) => l.value(x),
        })
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(match self {
            DrObjective::Quadratic(q) => q.gradient(x),
            DrObjective::Multilinear(m) => m.gradient(x),
            DrObjective::Linear(l) => l.coefficients().to_vec(),
        })
    }

    /// A single partial derivative `∂H/∂x_t` at `x`.
    pub fn grad_coord(&self, x: &[f64], t: usize) -> Result<f64> {
        self.check_point(x)?;
        check_index(t, self.dim())?;
        Ok(self.grad_coord_unchecked(x, t))
    }

    pub(crate) fn grad_coord_unchecked(&self, x: &[f64], t: usize) -> f64 {
        match self {
            DrObjective::Quadratic(q) => q.gradient_coord(x, t),
            DrObjective::Multilinear(m) => m.gradient_coord(x, t),
            DrObjective::Linear(l) => l.coefficients()[t],
        }
    }

    /// `∂H/∂x_t` at a prefix point: `omega` must vanish on every coordinate
    /// after `t`. This is the only gradient information available online at
    /// arrival `t`.
    pub fn prefix_grad_coord(&self, omega: &[f64], t: usize) -> Result<f64> {
        check_len(self.dim(), omega.len())?;
        check_index(t, self.dim())?;
        if let Some(coord) = omega[t + 1..].iter().position(|&v| v != 0.0) {
            return Err(Error::PrefixViolation { step: t, coord: coord + t + 1 });
        }
        self.grad_coord(omega, t)
    }
}

fn check_index(t: usize, dim: usize) -> Result<()> {
    if t < dim {
        Ok(())
    } else {
        Err(crate::error::invalid!("coordinate {} out of range for dimension {}", t, dim))
    }
}
