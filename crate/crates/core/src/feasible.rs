//! Per-step feasible sets `F_t` with exact linear-maximization oracles.
//!
//! Only scaled boxes `{0 ⪯ x ⪯ b}` and scaled simplices
//! `{x ⪰ 0, Σx ≤ s}` are supported. Both contain the origin and are
//! down-closed, so shrinking any coordinate of a member keeps it feasible.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Result};
use crate::math::{dot, sqrt};

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Box { bounds: Vec<f64>, radius: f64 },
    Simplex { dim: usize, scale: f64, radius: f64 },
}

impl FeasibleSet {
    /// Box with the tightest radius `‖b‖₂`.
    pub fn scaled_box(bounds: Vec<f64>) -> Result<Self> {
        let radius = sqrt(bounds.iter().map(|b| b * b).sum());
        Self::with_radius(FeasibleSet::Box { bounds, radius }, radius)
    }

    pub fn unit_box(dim: usize) -> Self {
        FeasibleSet::Box { bounds: vec![1.0; dim], radius: sqrt(dim as f64) }
    }

    /// Simplex `{x ⪰ 0, Σx ≤ scale}` with radius `scale`.
    pub fn scaled_simplex(dim: usize, scale: f64) -> Result<Self> {
        Self::with_radius(FeasibleSet::Simplex { dim, scale, radius: scale }, scale)
    }

    /// Replaces the declared radius `λ`, rejecting values that do not bound the set.
    pub fn with_radius(self, radius: f64) -> Result<Self> {
        let set = match self {
            FeasibleSet::Box { bounds, .. } => FeasibleSet::Box { bounds, radius },
            FeasibleSet::Simplex { dim, scale, .. } => FeasibleSet::Simplex { dim, scale, radius },
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::Box { bounds, radius } => {
                if bounds.iter().any(|b| !b.is_finite() || *b < 0.0) {
                    return Err(invalid!("box bounds must be finite and nonnegative"));
                }
                let sq: f64 = bounds.iter().map(|b| b * b).sum();
                if !(radius.is_finite() && radius * radius >= sq * (1.0 - 1e-12)) {
                    return Err(invalid!("radius {} does not bound the box (needs {})", radius, sqrt(sq)));
                }
            }
            FeasibleSet::Simplex { scale, radius, .. } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(invalid!("simplex scale must be positive"));
                }
                if !(radius.is_finite() && radius >= scale) {
                    return Err(invalid!("radius {} does not bound the simplex of scale {}", radius, scale));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { bounds, .. } => bounds.len(),
            FeasibleSet::Simplex { dim, .. } => *dim,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            FeasibleSet::Box { radius, .. } | FeasibleSet::Simplex { radius, .. } => *radius,
        }
    }

    /// Largest value each coordinate can take inside the set.
    pub fn coordinate_reach(&self) -> Vec<f64> {
        match self {
            FeasibleSet::Box { bounds, .. } => bounds.clone(),
            FeasibleSet::Simplex { dim, scale, .. } => vec![*scale; *dim],
        }
    }

    /// `argmax_{v ∈ F} ⟨v, d⟩`. Zero wins every tie: coordinates with
    /// `d_j ≤ 0` stay at 0 and the simplex returns the origin when `max d ≤ 0`.
    /// Among equal positive maxima the simplex picks the lowest index.
    pub fn linear_argmax(&self, d: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::Box { bounds, .. } => {
                bounds.iter().zip(d).map(|(&b, &dj)| if dj > 0.0 { b } else { 0.0 }).collect()
            }
            FeasibleSet::Simplex { dim, scale, .. } => {
                let mut v = vec![0.0; *dim];
                let mut best: Option<(usize, f64)> = None;
                for (j, &dj) in d.iter().enumerate() {
                    if dj > 0.0 && best.is_none_or(|(_, b)| dj > b) {
                        best = Some((j, dj));
                    }
                }
                if let Some((j, _)) = best {
                    v[j] = *scale;
                }
                v
            }
        }
    }

    /// Support function `σ_F(d) = sup_{x∈F} ⟨x, d⟩`.
    pub fn support(&self, d: &[f64]) -> f64 {
        match self {
            FeasibleSet::Box { bounds, .. } => bounds.iter().zip(d).map(|(b, dj)| b * dj.max(0.0)).sum(),
            FeasibleSet::Simplex { scale, .. } => scale * d.iter().fold(0.0f64, |acc, &dj| acc.max(dj)),
        }
    }

    /// Membership up to `tol` on every defining inequality.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite() || *v < -tol) {
            return false;
        }
        match self {
            FeasibleSet::Box { bounds, .. } => x.iter().zip(bounds).all(|(v, b)| *v <= b + tol),
            FeasibleSet::Simplex { scale, .. } => x.iter().sum::<f64>() <= scale + tol,
        }
    }

    pub fn check_direction(&self, d: &[f64]) -> Result<()> {
        check_len(self.dim(), d.len())
    }

    /// `⟨linear_argmax(d), d⟩`, the value the oracle attains.
    pub fn attained(&self, d: &[f64]) -> f64 {
        dot(&self.linear_argmax(d), d)
    }
}
