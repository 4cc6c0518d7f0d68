//! Designed penalty functions `G_i`, value-to-weight bounds `U_i`/`L_i`, and
//! the competitive-ratio formulas they yield.
//!
//! Two families are provided. The single-constraint design is linear with
//! slope `−L` up to the threshold `θ = (1+ε)/ln(Ue/L)` and exponential after
//! it. The multi-constraint design is
//! `G(u) = L(1+ε)/((e−1)γ) · (1 − (1+R)^{u/(1+ε)}) + L u/(e−1)` with
//! `R = U(e−1)/L` and `γ = ln(1+R)`. Both satisfy `G(0) = 0` and
//! `G'(1+ε) = −U`, so a row whose value-to-weight ratio never exceeds `U`
//! stops receiving mass once its load reaches `1+ε`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::math::{exp, ln, E};
use crate::objective::{DrObjective, SetFunctionTable};

/// Relative shrink applied to the computed `L` so that directions stay
/// strictly positive below the threshold when `U = L` exactly.
pub const LOWER_SHRINK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SingleConstraint,
    MultiConstraint,
    /// No packing row: `G ≡ 0`.
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyModel {
    regime: Regime,
    upper: f64,
    lower: f64,
    epsilon: f64,
}

impl PenaltyModel {
    pub fn new(regime: Regime, upper: f64, lower: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(invalid!("epsilon must be finite and nonnegative, got {}", epsilon));
        }
        if regime != Regime::Absent {
            if !(lower.is_finite() && upper.is_finite() && lower > 0.0) {
                return Err(invalid!("bounds must be finite with L > 0 (U = {}, L = {})", upper, lower));
            }
            if upper < lower {
                return Err(invalid!("U = {} is smaller than L = {}", upper, lower));
            }
        }
        Ok(Self { regime, upper, lower, epsilon })
    }

    pub fn single(upper: f64, lower: f64) -> Result<Self> {
        Self::new(Regime::SingleConstraint, upper, lower, 0.0)
    }

    pub fn multi(upper: f64, lower: f64) -> Result<Self> {
        Self::new(Regime::MultiConstraint, upper, lower, 0.0)
    }

    pub fn absent() -> Self {
        Self { regime: Regime::Absent, upper: 0.0, lower: 0.0, epsilon: 0.0 }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.regime, self.upper, self.lower, epsilon)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `ln(Ue/L) = 1 + ln(U/L)`.
    fn log_ratio_e(&self) -> f64 {
        1.0 + ln(self.upper / self.lower)
    }

    /// `γ = ln(1 + U(e−1)/L)`.
    fn gamma(&self) -> f64 {
        libm::log1p(self.upper * (E - 1.0) / self.lower)
    }

    /// Switch point `θ = (1+ε)/ln(Ue/L)` of the single-constraint design.
    pub fn threshold(&self) -> Option<f64> {
        (self.regime == Regime::SingleConstraint).then(|| (1.0 + self.epsilon) / self.log_ratio_e())
    }

    /// Load at which `G'` reaches `−U`.
    pub fn saturation_load(&self) -> f64 {
        1.0 + self.epsilon
    }

    pub fn value(&self, u: f64) -> Result<f64> {
        check_load(u)?;
        Ok(self.value_at(u))
    }

    pub fn derivative(&self, u: f64) -> Result<f64> {
        check_load(u)?;
        Ok(self.derivative_at(u))
    }

    pub(crate) fn value_at(&self, u: f64) -> f64 {
        let (l, s) = (self.lower, 1.0 + self.epsilon);
        match self.regime {
            Regime::Absent => 0.0,
            Regime::MultiConstraint => {
                let g = self.gamma();
                l * s / ((E - 1.0) * g) * -libm::expm1(g * u / s) + l * u / (E - 1.0)
            }
            Regime::SingleConstraint => {
                let beta = self.log_ratio_e();
                let theta = s / beta;
                if u < theta {
                    -l * u
                } else {
                    -theta * (l / E) * exp(beta * u / s)
                }
            }
        }
    }

    pub(crate) fn derivative_at(&self, u: f64) -> f64 {
        let (l, s) = (self.lower, 1.0 + self.epsilon);
        match self.regime {
            Regime::Absent => 0.0,
            Regime::MultiConstraint => -l / (E - 1.0) * libm::expm1(self.gamma() * u / s),
            Regime::SingleConstraint => {
                let beta = self.log_ratio_e();
                if u < s / beta {
                    -l
                } else {
                    -(l / E) * exp(beta * u / s)
                }
            }
        }
    }
}

fn check_load(u: f64) -> Result<()> {
    if u.is_finite() && u >= 0.0 {
        Ok(())
    } else {
        Err(invalid!("penalty argument must be a finite nonnegative load, got {}", u))
    }
}

/// Value-to-weight bounds of one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBounds {
    pub upper: f64,
    /// `lower_exact · (1 − LOWER_SHRINK)`.
    pub lower: f64,
    pub lower_exact: f64,
}

/// `U = max_t sup{∇_t H(x)/c_t : ĉᵀx = 1}` and `L = min_t inf{∇_t H(x)/c_t : ĉᵀx ≤ 1}`
/// over `0 ⪯ x ⪯ domain_box` (intersected with the objective's own domain).
/// Coordinates with zero cost are excluded from the max/min.
///
/// Linear objectives are exact. Quadratics are exact as well: `∇_t H` is
/// affine, so both extrema are fractional-knapsack linear programs. For
/// multilinear objectives the extrema are taken over the polytope vertices
/// (up to 16 elements); beyond that the anti-tone bounds `∇H(0)` and
/// `∇H(corner)` are used.
pub fn compute_ul(obj: &DrObjective, chat: &[f64], domain_box: &[f64]) -> Result<RatioBounds> {
    let m = obj.dim();
    check_len(m, chat.len())?;
    check_len(m, domain_box.len())?;
    if chat.iter().any(|&c| !c.is_finite() || c < 0.0) || chat.iter().all(|&c| c == 0.0) {
        return Err(invalid!("row costs must be nonnegative and not all zero"));
    }
    let reach: Vec<f64> = obj.domain_box().iter().zip(domain_box).map(|(a, b)| a.min(*b)).collect();
    let (sup, inf) = gradient_extrema(obj, chat, &reach)?;
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    for t in (0..m).filter(|&t| chat[t] > 0.0) {
        upper = upper.max(sup[t] / chat[t]);
        lower = lower.min(inf[t] / chat[t]);
    }
    if !upper.is_finite() {
        return Err(invalid!("value-to-weight ratio is unbounded above"));
    }
    if lower.is_nan() || lower <= 0.0 {
        return Err(Error::NonPositiveLowerBound(lower));
    }
    Ok(RatioBounds { upper, lower: lower * (1.0 - LOWER_SHRINK), lower_exact: lower })
}

/// Per-coordinate `(sup over the budget face, inf over the budget region)` of `∇_t H`.
fn gradient_extrema(obj: &DrObjective, chat: &[f64], reach: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = obj.dim();
    match obj {
        DrObjective::Linear(l) => Ok((l.coefficients().to_vec(), l.coefficients().to_vec())),
        DrObjective::Quadratic(q) => {
            let mut sup = vec![0.0; m];
            let mut inf = vec![0.0; m];
            for t in 0..m {
                let row = q.hessian().row(t);
                let neg: Vec<f64> = row.iter().map(|v| -v).collect();
                sup[t] = q.linear()[t] + knapsack_max(row, chat, reach, true)?;
                inf[t] = q.linear()[t] - knapsack_max(&neg, chat, reach, false)?;
            }
            Ok((sup, inf))
        }
        DrObjective::Multilinear(ml) if m <= 16 => Ok(multilinear_vertex_extrema(ml.table(), chat, reach)),
        DrObjective::Multilinear(_) => {
            let corner: Vec<f64> =
                reach.iter().zip(chat).map(|(&e, &c)| if c > 0.0 { e.min(1.0 / c) } else { e }).collect();
            Ok((obj.grad(&vec![0.0; m])?, obj.grad(&corner)?))
        }
    }
}

/// `max wᵀx` subject to `cᵀx = 1` (or `≤ 1`) and `0 ⪯ x ⪯ e`, by the greedy
/// ratio rule. When the box cannot reach the budget face the equality
/// variant fills the whole box.
fn knapsack_max(w: &[f64], c: &[f64], e: &[f64], equality: bool) -> Result<f64> {
    let mut total = 0.0;
    let mut items: Vec<usize> = Vec::new();
    for j in 0..w.len() {
        if c[j] == 0.0 {
            if w[j] > 0.0 {
                if !e[j].is_finite() {
                    return Err(invalid!("coordinate {} is unbounded: zero cost and unbounded domain", j));
                }
                total += w[j] * e[j];
            }
        } else {
            items.push(j);
        }
    }
    items.sort_by(|&a, &b| (w[b] / c[b]).total_cmp(&(w[a] / c[a])));
    let mut room = 1.0;
    for j in items {
        if room <= 0.0 || (!equality && w[j] <= 0.0) {
            break;
        }
        let x = e[j].min(room / c[j]);
        total += w[j] * x;
        room -= c[j] * x;
    }
    Ok(total)
}

fn multilinear_vertex_extrema(f: &SetFunctionTable, chat: &[f64], reach: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = f.ground_size();
    // the multilinear domain is [0,1]; a bound below 1 is not a cube vertex,
    // so reach only matters through whether a coordinate may be used at all
    let usable: Vec<bool> = reach.iter().map(|&e| e > 0.0).collect();
    // ∇_t F at an integral point A.
    let grad_at = |a: u32, t: usize| f.value(a | 1 << t) - f.value(a & !(1 << t));
    let mut sup = vec![f64::NEG_INFINITY; m];
    let mut inf = vec![f64::INFINITY; m];
    let mut face_seen = false;
    let mut record = |on_face: bool, g: &dyn Fn(usize) -> f64| {
        for t in 0..m {
            let v = g(t);
            inf[t] = inf[t].min(v);
            if on_face {
                sup[t] = sup[t].max(v);
            }
        }
    };
    for a in 0..1u32 << m {
        if (0..m).any(|j| a >> j & 1 == 1 && !usable[j]) {
            continue;
        }
        let load: f64 = (0..m).filter(|&j| a >> j & 1 == 1).map(|j| chat[j]).sum();
        if load > 1.0 + 1e-12 {
            continue;
        }
        let on_face = (load - 1.0).abs() <= 1e-12;
        face_seen |= on_face;
        record(on_face, &|t| grad_at(a, t));
        // vertices with one fractional coordinate k on the budget face
        for k in (0..m).filter(|&k| a >> k & 1 == 0 && usable[k] && chat[k] > 0.0) {
            let xk = (1.0 - load) / chat[k];
            if xk <= 0.0 || xk >= 1.0 {
                continue;
            }
            face_seen = true;
            let with_k = a | 1 << k;
            record(true, &|t| {
                if t == k {
                    grad_at(a, t)
                } else {
                    (1.0 - xk) * grad_at(a, t) + xk * grad_at(with_k, t)
                }
            });
        }
    }
    if !face_seen {
        // the budget face is out of reach: use the top corner of the box
        let top = (0..m).filter(|&j| usable[j]).fold(0u32, |acc, j| acc | 1 << j);
        for (t, s) in sup.iter_mut().enumerate() {
            *s = grad_at(top, t);
        }
    }
    (sup, inf)
}

/// Theoretical guarantee together with the quantities that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub regime: Regime,
    pub theoretical_cr: f64,
    /// `−(1+ε)α_i + γ_i e/(e−1)` (multi) or `−(1+ε)α + ln(Ue/L)` (single).
    pub per_row_terms: Vec<f64>,
    pub alpha_used: Vec<f64>,
    pub epsilon: f64,
    /// `L_smooth · m · λ² / K`.
    pub finite_k_slack: Option<f64>,
    pub empirical_cr: Option<f64>,
}

impl BoundReport {
    pub fn with_finite_k_slack(mut self, smoothness: f64, steps: usize, radius: f64, k: usize) -> Self {
        self.finite_k_slack = Some(smoothness * steps as f64 * radius * radius / k as f64);
        self
    }

    pub fn with_empirical(mut self, alg: f64, opt: f64) -> Self {
        self.empirical_cr = Some(if opt > 0.0 { alg / opt } else { 1.0 });
        self
    }

    /// `empirical ≥ theoretical · (1 − margin)`; `None` until an empirical value is attached.
    pub fn satisfied(&self, margin: f64) -> Option<bool> {
        self.empirical_cr.map(|cr| cr >= self.theoretical_cr * (1.0 - margin))
    }
}

/// Competitive-ratio bound for the given curvature and ratio bounds.
///
/// Multi: `(1+ε) / max_i{−(1+ε)α_i + ln(1 + U_i(e−1)/L_i) · e/(e−1)}`.
/// Single: `(1+ε) / (−(1+ε)α + ln(Ue/L))`, which at `ε = 0` reads
/// `1 / (1 − α + ln(U/L))`.
pub fn theoretical_cr(
    regime: Regime,
    alphas: &[f64],
    uppers: &[f64],
    lowers: &[f64],
    epsilon: f64,
) -> Result<BoundReport> {
    let n = alphas.len();
    check_len(n, uppers.len())?;
    check_len(n, lowers.len())?;
    if n == 0 {
        return Err(invalid!("at least one row is required"));
    }
    if alphas.iter().any(|a| !(-1.0..=0.0).contains(a)) {
        return Err(invalid!("alpha values must lie in [-1, 0]"));
    }
    let s = 1.0 + epsilon;
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        let p = PenaltyModel::new(regime, uppers[i], lowers[i], epsilon)?;
        let term = match regime {
            Regime::MultiConstraint => -s * alphas[i] + p.gamma() * E / (E - 1.0),
            Regime::SingleConstraint => {
                if n != 1 {
                    return Err(invalid!("single-constraint bound needs exactly one row, got {}", n));
                }
                -s * alphas[i] + p.log_ratio_e()
            }
            Regime::Absent => return Err(invalid!("no packing rows: the bound is undefined")),
        };
        terms.push(term);
    }
    let worst = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundReport {
        regime,
        theoretical_cr: s / worst,
        per_row_terms: terms,
        alpha_used: alphas.to_vec(),
        epsilon,
        finite_k_slack: None,
        empirical_cr: None,
    })
}
