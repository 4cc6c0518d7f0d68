//! The online engine: for every arrival `t` it runs `K` Frank-Wolfe
//! micro-steps along penalty-adjusted prefix gradients
//!
//! ```text
//! [d_t(k)]_i = ∇_t H_i(ω_{i,t}(k)) + c_{i,t} · G'_i(ĉ_iᵀ ω_{i,t}(k))
//! v_t(k+1)   = argmax_{v ∈ F_t} ⟨v, d_t(k)⟩
//! x̃_t(k+1)  = x̃_t(k) + v_t(k+1) / K
//! ```
//!
//! and commits `x̃_t = x̃_t(K)` before step `t + 1` is revealed. `ω_{i,t}(k)`
//! is row `i` of the allocation matrix at that moment: final values for
//! earlier steps, the in-progress value at `t`, zeros afterwards.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::feasible::FeasibleSet;
use crate::math::{dot, Matrix};
use crate::objective::DrObjective;
use crate::penalty::PenaltyModel;

/// The full problem: `n` packing rows, `m` arrivals.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineInstance {
    costs: Matrix,
    sets: Vec<FeasibleSet>,
    objectives: Vec<DrObjective>,
}

impl OnlineInstance {
    pub fn new(costs: Matrix, sets: Vec<FeasibleSet>, objectives: Vec<DrObjective>) -> Result<Self> {
        let (n, m) = (costs.rows(), costs.cols());
        check_len(m, sets.len())?;
        check_len(n, objectives.len())?;
        if costs.as_slice().iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(invalid!("cost matrix must be finite and nonnegative"));
        }
        for (t, set) in sets.iter().enumerate() {
            set.validate()?;
            if set.dim() != n {
                return Err(invalid!("set {} has dimension {}, expected {}", t, set.dim(), n));
            }
        }
        for (i, obj) in objectives.iter().enumerate() {
            if obj.dim() != m {
                return Err(invalid!("objective {} has dimension {}, expected {}", i, obj.dim(), m));
            }
        }
        Ok(Self { costs, sets, objectives })
    }

    pub fn rows(&self) -> usize {
        self.costs.rows()
    }

    pub fn steps(&self) -> usize {
        self.costs.cols()
    }

    pub fn costs(&self) -> &Matrix {
        &self.costs
    }

    pub fn sets(&self) -> &[FeasibleSet] {
        &self.sets
    }

    pub fn objectives(&self) -> &[DrObjective] {
        &self.objectives
    }

    /// `ĉ_i`, the costs of row `i` across all steps.
    pub fn row_costs(&self, i: usize) -> &[f64] {
        self.costs.row(i)
    }

    /// Largest value `[x_t]_i` can take in `F_t`, for each step `t`.
    pub fn row_reach(&self, i: usize) -> Vec<f64> {
        self.sets.iter().map(|s| s.coordinate_reach()[i]).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.sets.iter().map(FeasibleSet::radius).fold(0.0, f64::max)
    }

    /// `true` when the instance carries at least one nonzero cost in row `i`.
    pub fn has_budget(&self, i: usize) -> bool {
        self.row_costs(i).iter().any(|&c| c > 0.0)
    }

    /// Online view of the instance that rejects any look-ahead.
    pub fn stream(&self) -> GuardedSource<'_> {
        GuardedSource { instance: self, revealed: None }
    }
}

/// Data revealed at arrival `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrival {
    pub costs: Vec<f64>,
    pub set: FeasibleSet,
}

/// What the engine may observe. Implementations decide how much of the
/// instance is visible at each point of the run.
pub trait ArrivalSource {
    fn rows(&self) -> usize;
    fn steps(&self) -> usize;
    /// Reveals step `t`; steps must be requested in order.
    fn arrive(&mut self, t: usize) -> Result<Arrival>;
    /// `∇_t H_row(omega)` for a prefix point `omega` of an arrived step `t`.
    fn prefix_grad(&self, row: usize, omega: &[f64], t: usize) -> Result<f64>;
    /// `H_row(x)`; available once every step has arrived.
    fn final_value(&self, row: usize, x: &[f64]) -> Result<f64>;
    /// `∇H_row(x)`; available once every step has arrived.
    fn final_grad(&self, row: usize, x: &[f64]) -> Result<Vec<f64>>;
}

/// Reveals an [`OnlineInstance`] one step at a time and fails on any access
/// to costs, sets or gradient coordinates that have not arrived yet.
#[derive(Debug, Clone)]
pub struct GuardedSource<'a> {
    instance: &'a OnlineInstance,
    revealed: Option<usize>,
}

impl GuardedSource<'_> {
    pub fn revealed(&self) -> Option<usize> {
        self.revealed
    }

    fn require_finished(&self) -> Result<()> {
        let m = self.instance.steps();
        if m == 0 || self.revealed == Some(m - 1) {
            Ok(())
        } else {
            Err(Error::OnlineViolation { requested: m, revealed: self.revealed })
        }
    }
}

impl ArrivalSource for GuardedSource<'_> {
    fn rows(&self) -> usize {
        self.instance.rows()
    }

    fn steps(&self) -> usize {
        self.instance.steps()
    }

    fn arrive(&mut self, t: usize) -> Result<Arrival> {
        let next = self.revealed.map_or(0, |r| r + 1);
        if t != next || t >= self.instance.steps() {
            return Err(Error::OnlineViolation { requested: t, revealed: self.revealed });
        }
        self.revealed = Some(t);
        Ok(Arrival { costs: self.instance.costs.column(t), set: self.instance.sets[t].clone() })
    }

    fn prefix_grad(&self, row: usize, omega: &[f64], t: usize) -> Result<f64> {
        if self.revealed.is_none_or(|r| t > r) {
            return Err(Error::OnlineViolation { requested: t, revealed: self.revealed });
        }
        self.instance.objectives[row].prefix_grad_coord(omega, t)
    }

    fn final_value(&self, row: usize, x: &[f64]) -> Result<f64> {
        self.require_finished()?;
        self.instance.objectives[row].eval(x)
    }

    fn final_grad(&self, row: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.require_finished()?;
        self.instance.objectives[row].grad(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvershootPolicy {
    /// Clip a micro-step so that no row load passes its saturation load.
    CapFinalMicrostep,
    /// Take every micro-step in full.
    AllowRaw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub k: usize,
    pub overshoot: OvershootPolicy,
    pub budget_tol: f64,
    /// Keep `(d_t(k), v_t(k+1))` for every micro-step.
    pub record_inner: bool,
}

impl EngineConfig {
    pub fn new(k: usize) -> Self {
        Self { k, overshoot: OvershootPolicy::CapFinalMicrostep, budget_tol: 1e-9, record_inner: false }
    }

    pub fn with_overshoot(mut self, policy: OvershootPolicy) -> Self {
        self.overshoot = policy;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_inner = true;
        self
    }
}

/// `(Y, z)` read off at termination: `ŷ_i = ∇H_i(x̂_i)`, `z_i = −G'_i(ĉ_iᵀ x̂_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub y: Matrix,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerStep {
    pub step: usize,
    pub iteration: usize,
    pub direction: Vec<f64>,
    pub vertex: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub k: usize,
    pub overshoot: OvershootPolicy,
    /// `n × m`; column `t` is `x̃_t`.
    pub allocations: Matrix,
    /// `n × m`; entry `(i, t)` is `ĉ_iᵀ ω_{i,t}(K)`.
    pub step_loads: Matrix,
    pub loads: Vec<f64>,
    pub alg: f64,
    pub p_gseq: f64,
    pub dual: DualPoint,
    /// Per row, `(max, min)` of `∇_t H_i(ω) / c_{i,t}` over every visited
    /// micro-step with `c_{i,t} > 0`; `None` for rows never charged.
    pub observed_ratios: Vec<Option<(f64, f64)>>,
    pub inner: Option<Vec<InnerStep>>,
}

fn check_penalties(n: usize, penalties: &[PenaltyModel]) -> Result<()> {
    if penalties.len() != n {
        return Err(invalid!("{} penalty models supplied for {} rows", penalties.len(), n));
    }
    Ok(())
}

/// Fills `grads` with `∇_t H_i` and returns `d_t`.
fn direction_from<S: ArrivalSource + ?Sized>(
    source: &S,
    penalties: &[PenaltyModel],
    omega: &Matrix,
    loads: &[f64],
    costs: &[f64],
    t: usize,
    grads: &mut [f64],
) -> Result<Vec<f64>> {
    (0..omega.rows())
        .map(|i| {
            grads[i] = source.prefix_grad(i, omega.row(i), t)?;
            Ok(grads[i] + costs[i] * penalties[i].derivative_at(loads[i].max(0.0)))
        })
        .collect()
}

/// `d_t` at the prefix state `omega` (`n × m`, zero after column `t`).
pub fn direction(instance: &OnlineInstance, penalties: &[PenaltyModel], omega: &Matrix, t: usize) -> Result<Vec<f64>> {
    let (n, m) = (instance.rows(), instance.steps());
    check_penalties(n, penalties)?;
    if omega.rows() != n || omega.cols() != m {
        return Err(invalid!("state is {}x{}, expected {}x{}", omega.rows(), omega.cols(), n, m));
    }
    if t >= m {
        return Err(invalid!("step {} out of range for {} steps", t, m));
    }
    let loads: Vec<f64> = (0..n).map(|i| dot(instance.row_costs(i), omega.row(i))).collect();
    let full = FullView(instance);
    direction_from(&full, penalties, omega, &loads, &instance.costs.column(t), t, &mut vec![0.0; n])
}

/// Unrestricted view used for evaluating states supplied by the caller.
struct FullView<'a>(&'a OnlineInstance);

impl ArrivalSource for FullView<'_> {
    fn rows(&self) -> usize {
        self.0.rows()
    }
    fn steps(&self) -> usize {
        self.0.steps()
    }
    fn arrive(&mut self, t: usize) -> Result<Arrival> {
        Ok(Arrival { costs: self.0.costs.column(t), set: self.0.sets[t].clone() })
    }
    fn prefix_grad(&self, row: usize, omega: &[f64], t: usize) -> Result<f64> {
        self.0.objectives[row].prefix_grad_coord(omega, t)
    }
    fn final_value(&self, row: usize, x: &[f64]) -> Result<f64> {
        self.0.objectives[row].eval(x)
    }
    fn final_grad(&self, row: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.0.objectives[row].grad(x)
    }
}

/// Runs the engine over `instance` through a [`GuardedSource`].
pub fn run_online(instance: &OnlineInstance, penalties: &[PenaltyModel], cfg: &EngineConfig) -> Result<RunTrace> {
    run_online_from(&mut instance.stream(), penalties, cfg)
}

/// Runs the engine against any [`ArrivalSource`]. An error from the source
/// (for example a look-ahead rejected by the guard) aborts the run.
pub fn run_online_from<S: ArrivalSource + ?Sized>(
    source: &mut S,
    penalties: &[PenaltyModel],
    cfg: &EngineConfig,
) -> Result<RunTrace> {
    if cfg.k == 0 {
        return Err(invalid!("K must be at least 1"));
    }
    let (n, m) = (source.rows(), source.steps());
    check_penalties(n, penalties)?;
    let inv_k = 1.0 / cfg.k as f64;
    let mut x = Matrix::zeros(n, m);
    let mut step_loads = Matrix::zeros(n, m);
    let mut loads = vec![0.0; n];
    let mut inner = cfg.record_inner.then(Vec::new);
    let mut grads = vec![0.0; n];
    let mut observed: Vec<Option<(f64, f64)>> = vec![None; n];

    for t in 0..m {
        let arrival = source.arrive(t)?;
        check_len(n, arrival.costs.len())?;
        if arrival.set.dim() != n {
            return Err(invalid!("set at step {} has dimension {}, expected {}", t, arrival.set.dim(), n));
        }
        for k in 0..cfg.k {
            let d = direction_from(&*source, penalties, &x, &loads, &arrival.costs, t, &mut grads)?;
            for i in (0..n).filter(|&i| arrival.costs[i] > 0.0) {
                let r = grads[i] / arrival.costs[i];
                observed[i] = Some(observed[i].map_or((r, r), |(hi, lo)| (hi.max(r), lo.min(r))));
            }
            let v = arrival.set.linear_argmax(&d);
            for i in 0..n {
                let mut delta = v[i] * inv_k;
                let c = arrival.costs[i];
                if delta <= 0.0 {
                    continue;
                }
                if cfg.overshoot == OvershootPolicy::CapFinalMicrostep && c > 0.0 {
                    let room = (penalties[i].saturation_load() - loads[i]).max(0.0);
                    delta = delta.min(room / c);
                }
                x.set(i, t, x.get(i, t) + delta);
                loads[i] += c * delta;
            }
            if let Some(rec) = inner.as_mut() {
                rec.push(InnerStep { step: t, iteration: k, direction: d, vertex: v });
            }
        }
        for (i, &l) in loads.iter().enumerate() {
            step_loads.set(i, t, l);
        }
    }

    let mut alg = 0.0;
    let mut p_gseq = 0.0;
    let mut y = Matrix::zeros(n, m);
    let mut z = vec![0.0; n];
    for i in 0..n {
        let h = source.final_value(i, x.row(i))?;
        alg += h;
        p_gseq += h + penalties[i].value_at(loads[i].max(0.0));
        y.row_mut(i).copy_from_slice(&source.final_grad(i, x.row(i))?);
        z[i] = -penalties[i].derivative_at(loads[i].max(0.0));
    }
    Ok(RunTrace {
        k: cfg.k,
        overshoot: cfg.overshoot,
        allocations: x,
        step_loads,
        loads,
        alg,
        p_gseq,
        dual: DualPoint { y, z },
        observed_ratios: observed,
        inner,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvaluation {
    pub alg: f64,
    pub p_gseq: f64,
    pub loads: Vec<f64>,
    /// Rows with load above `1 + budget_tol`.
    pub overloaded_rows: Vec<usize>,
    /// Steps whose allocation lies outside `F_t` (tolerance `budget_tol`).
    pub infeasible_steps: Vec<usize>,
}

impl TraceEvaluation {
    pub fn feasible(&self) -> bool {
        self.overloaded_rows.is_empty() && self.infeasible_steps.is_empty()
    }
}

/// Recomputes objective values, loads and feasibility flags of an allocation from scratch.
pub fn evaluate_trace(
    instance: &OnlineInstance,
    penalties: &[PenaltyModel],
    allocations: &Matrix,
    budget_tol: f64,
) -> Result<TraceEvaluation> {
    let (n, m) = (instance.rows(), instance.steps());
    check_penalties(n, penalties)?;
    if allocations.rows() != n || allocations.cols() != m {
        return Err(invalid!("allocation is {}x{}, expected {}x{}", allocations.rows(), allocations.cols(), n, m));
    }
    let mut alg = 0.0;
    let mut p_gseq = 0.0;
    let mut loads = Vec::with_capacity(n);
    for (i, penalty) in penalties.iter().enumerate() {
        let row = allocations.row(i);
        let load = dot(instance.row_costs(i), row);
        let h = instance.objectives[i].eval(row)?;
        alg += h;
        p_gseq += h + penalty.value_at(load.max(0.0));
        loads.push(load);
    }
    let overloaded_rows = (0..n).filter(|&i| loads[i] > 1.0 + budget_tol).collect();
    let infeasible_steps = (0..m).filter(|&t| !instance.sets[t].contains(&allocations.column(t), budget_tol)).collect();
    Ok(TraceEvaluation { alg, p_gseq, loads, overloaded_rows, infeasible_steps })
}
