use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::sqrt;

/// Largest ground set for which the multilinear extension is evaluated exactly.
pub const MAX_GROUND_SET: usize = 20;

/// A set function on `{0, .., v-1}` stored as a table of `2^v` values.
/// Entry `mask` holds `f(S)` where bit `j` of `mask` marks element `j ∈ S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunctionTable {
    ground: usize,
    values: Vec<f64>,
}

impl SetFunctionTable {
    pub fn new(ground: usize, values: Vec<f64>) -> Result<Self> {
        if ground > MAX_GROUND_SET {
            return Err(Error::GroundSetTooLarge(ground));
        }
        if values.len() != 1 << ground {
            return Err(invalid!("expected {} table entries, got {}", 1usize << ground, values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("set function values must be finite"));
        }
        if values[0] != 0.0 {
            return Err(invalid!("set function must be normalized, f(empty) = {}", values[0]));
        }
        Ok(Self { ground, values })
    }

    pub fn from_fn(ground: usize, f: impl Fn(u32) -> f64) -> Result<Self> {
        if ground > MAX_GROUND_SET {
            return Err(Error::GroundSetTooLarge(ground));
        }
        Self::new(ground, (0..1u32 << ground).map(f).collect())
    }

    /// `f(S) = Σ_{j∈S} w_j`.
    pub fn modular(weights: &[f64]) -> Result<Self> {
        Self::from_fn(weights.len(), |s| masked_sum(weights, s))
    }

    /// `f(S) = sqrt(Σ_{j∈S} w_j)`, a concave function of a modular one.
    pub fn concave_of_modular(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0) {
            return Err(invalid!("weights must be nonnegative"));
        }
        Self::from_fn(weights.len(), |s| sqrt(masked_sum(weights, s)))
    }

    /// Weighted coverage: element `j` covers the universe items flagged in
    /// `covers[j]`; `f(S)` is the total weight of items covered by `S`.
    pub fn coverage(item_weights: &[f64], covers: &[u64]) -> Result<Self> {
        if item_weights.len() > 64 {
            return Err(invalid!("coverage universe is limited to 64 items"));
        }
        if item_weights.iter().any(|&w| w < 0.0) {
            return Err(invalid!("item weights must be nonnegative"));
        }
        Self::from_fn(covers.len(), |s| {
            let union = covers.iter().enumerate().filter(|(j, _)| s >> j & 1 == 1).fold(0u64, |acc, (_, c)| acc | c);
            masked_sum(item_weights, union)
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.ground) - 1) as u32
    }

    /// `f(S ∪ {j}) − f(S)`.
    pub fn marginal(&self, j: usize, mask: u32) -> f64 {
        self.value(mask | 1 << j) - self.value(mask)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        (0..self.values.len() as u32).all(|s| (0..self.ground).all(|j| s >> j & 1 == 1 || self.marginal(j, s) >= -tol))
    }

    /// Checks diminishing marginals through the equivalent local condition
    /// `f(S+j) + f(S+k) ≥ f(S+j+k) + f(S)` for all `S` and `j, k ∉ S`.
    pub fn is_submodular(&self, tol: f64) -> bool {
        for s in 0..self.values.len() as u32 {
            for j in 0..self.ground {
                if s >> j & 1 == 1 {
                    continue;
                }
                for k in j + 1..self.ground {
                    if s >> k & 1 == 1 {
                        continue;
                    }
                    if self.marginal(j, s) < self.marginal(j, s | 1 << k) - tol {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn masked_sum(weights: &[f64], mask: impl Into<u64>) -> f64 {
    let mask = mask.into();
    weights.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, w)| w).sum()
}

/// Multilinear extension `F(x) = E_{S∼x}[f(S)]`, computed exactly.
///
/// Evaluation folds the value table one element at a time
/// (`F = x_j F|_{j∈S} + (1 − x_j) F|_{j∉S}`), which costs `O(2^v)`. Trailing
/// zero coordinates are skipped, so prefix points only touch the sub-table
/// of subsets of the arrived elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Multilinear {
    table: SetFunctionTable,
}

impl Multilinear {
    pub fn new(table: SetFunctionTable) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &SetFunctionTable {
        &self.table
    }

    pub fn dim(&self) -> usize {
        self.table.ground
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        let bits = active_bits(x, None);
        fold(&self.table.values, x, bits, None)
    }

    pub(crate) fn gradient_coord(&self, x: &[f64], t: usize) -> f64 {
        let bits = active_bits(x, Some(t));
        fold(&self.table.values, x, bits, Some(t))
    }

    pub(crate) fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|t| self.gradient_coord(x, t)).collect()
    }
}

/// Number of leading elements that can matter: one past the last nonzero
/// coordinate (and past `keep`, when a derivative is requested there).
fn active_bits(x: &[f64], keep: Option<usize>) -> usize {
    let last = x.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1);
    keep.map_or(last, |t| last.max(t + 1))
}

fn fold(values: &[f64], x: &[f64], bits: usize, derivative: Option<usize>) -> f64 {
    let mut buf = values[..1 << bits].to_vec();
    for i in (0..bits).rev() {
        let half = 1 << i;
        let (lo, hi) = buf.split_at_mut(half);
        if derivative == Some(i) {
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l = *h - *l;
            }
        } else {
            let xi = x[i];
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l = (1.0 - xi) * *l + xi * *h;
            }
        }
        buf.truncate(half);
    }
    buf[0]
}

/// Direct evaluation of the multilinear extension as
/// `Σ_S f(S) Π_{i∈S} x_i Π_{j∉S} (1 − x_j)`, one subset at a time.
///
/// Shares no code with the folding evaluator and serves as its oracle.
pub mod reference {
    use super::SetFunctionTable;
    use alloc::vec::Vec;

    fn weight(x: &[f64], mask: u32, skip: Option<usize>) -> f64 {
        let mut w = 1.0;
        for (i, &xi) in x.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            w *= if mask >> i & 1 == 1 { xi } else { 1.0 - xi };
        }
        w
    }

    pub fn eval_by_enumeration(table: &SetFunctionTable, x: &[f64]) -> f64 {
        (0..1u32 << table.ground_size()).map(|s| table.value(s) * weight(x, s, None)).sum()
    }

    /// `∂F/∂x_t = E_{S∼x}[f(S ∪ {t}) − f(S \ {t})]`.
    pub fn grad_by_enumeration(table: &SetFunctionTable, x: &[f64]) -> Vec<f64> {
        (0..table.ground_size())
            .map(|t| {
                (0..1u32 << table.ground_size())
                    .filter(|s| s >> t & 1 == 0)
                    .map(|s| table.marginal(t, s) * weight(x, s, Some(t)))
                    .sum()
            })
            .collect()
    }
}
