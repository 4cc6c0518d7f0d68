//! Offline baselines: continuous-greedy Frank-Wolfe over the joint polytope,
//! exhaustive grid search for tiny instances, and the dual objective
//!
//! ```text
//! D(Y, z) = Σ_t σ_{F_t}(y_t − z∘c_t) − Σ_i H_i*(ŷ_i) + Σ_i z_i
//! H_i*(y) = inf_x ⟨x, y⟩ − H_i(x)
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{DualPoint, OnlineInstance};
use crate::error::{invalid, Error, Result};
use crate::feasible::FeasibleSet;
use crate::lp::PackingLp;
use crate::math::{dot, norm1, Matrix};
use crate::objective::{odometer, DrObjective};

/// Largest `n·m` accepted by the grid oracles.
pub const BRUTE_MAX_VARS: usize = 6;
pub const BRUTE_MAX_GRID: usize = 21;
/// Largest number of grid nodes visited for one conjugate evaluation.
pub const CONJUGATE_MAX_NODES: usize = 20_000_000;

/// `{X ⪰ 0 : x_t ∈ F_t, ĉ_iᵀx̂_i ≤ 1}` intersected with the objective domains,
/// over variables `x_{i,t}` stored at `i·m + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflinePolytope {
    rows: usize,
    steps: usize,
    lp: PackingLp,
}

impl OfflinePolytope {
    pub fn new(instance: &OnlineInstance) -> Result<Self> {
        let (n, m) = (instance.rows(), instance.steps());
        let mut upper = vec![0.0; n * m];
        for i in 0..n {
            let domain = instance.objectives()[i].domain_box();
            for (t, set) in instance.sets().iter().enumerate() {
                upper[i * m + t] = set.coordinate_reach()[i].min(domain[t]);
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in (0..n).filter(|&i| instance.has_budget(i)) {
            let mut row = vec![0.0; n * m];
            row[i * m..(i + 1) * m].copy_from_slice(instance.row_costs(i));
            a.push(row);
            b.push(1.0);
        }
        for (t, set) in instance.sets().iter().enumerate() {
            if let FeasibleSet::Simplex { scale, .. } = set {
                let mut row = vec![0.0; n * m];
                for i in 0..n {
                    row[i * m + t] = 1.0;
                }
                a.push(row);
                b.push(*scale);
            }
        }
        let a = if a.is_empty() { Matrix::zeros(0, n * m) } else { Matrix::from_rows(&a)? };
        Ok(Self { rows: n, steps: m, lp: PackingLp::new(a, b, upper)? })
    }

    pub fn lp(&self) -> &PackingLp {
        &self.lp
    }

    /// Per-variable upper bounds, row-major `n × m`.
    pub fn upper(&self) -> &[f64] {
        self.lp.upper()
    }

    pub fn contains(&self, x: &Matrix, tol: f64) -> bool {
        x.rows() == self.rows && x.cols() == self.steps && self.lp.is_feasible(x.as_slice(), tol)
    }

    /// Exact maximizer of `⟨V, W⟩` over the polytope.
    pub fn maximize(&self, weights: &Matrix) -> Result<Matrix> {
        let sol = self.lp.maximize(weights.as_slice())?;
        Matrix::from_row_major(self.rows, self.steps, sol.x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution {
    pub x: Matrix,
    pub value: f64,
}

fn total_value(instance: &OnlineInstance, x: &Matrix) -> Result<f64> {
    (0..instance.rows()).map(|i| instance.objectives()[i].eval(x.row(i))).sum()
}

/// `K_off` continuous-greedy steps `X ← X + v_max / K_off`.
pub fn offline_fw(instance: &OnlineInstance, k_off: usize) -> Result<OfflineSolution> {
    if k_off == 0 {
        return Err(invalid!("K_off must be at least 1"));
    }
    let (n, m) = (instance.rows(), instance.steps());
    let poly = OfflinePolytope::new(instance)?;
    let inv_k = 1.0 / k_off as f64;
    let mut x = Matrix::zeros(n, m);
    let mut grad = Matrix::zeros(n, m);
    for _ in 0..k_off {
        for i in 0..n {
            let g = instance.objectives()[i].grad(x.row(i))?;
            grad.row_mut(i).copy_from_slice(&g);
        }
        if grad.as_slice().iter().all(|&g| g <= 0.0) {
            break;
        }
        let v = poly.maximize(&grad)?;
        for i in 0..n {
            for (xv, vv) in x.row_mut(i).iter_mut().zip(v.row(i)) {
                *xv += vv * inv_k;
            }
        }
    }
    let value = total_value(instance, &x)?;
    Ok(OfflineSolution { x, value })
}

/// Per-variable grid ranges `[0, b]` enclosing the feasible region.
fn enclosing_box(instance: &OnlineInstance) -> Result<Vec<f64>> {
    let poly = OfflinePolytope::new(instance)?;
    let m = instance.steps();
    let mut ub = poly.upper().to_vec();
    for (k, b) in ub.iter_mut().enumerate() {
        let c = instance.costs().get(k / m, k % m);
        if c > 0.0 {
            *b = b.min(1.0 / c);
        }
    }
    Ok(ub)
}

fn check_grid(instance: &OnlineInstance, grid: usize) -> Result<()> {
    let vars = instance.rows() * instance.steps();
    if vars > BRUTE_MAX_VARS {
        return Err(Error::TooLarge(alloc::format!("{} variables (limit {})", vars, BRUTE_MAX_VARS)));
    }
    if !(2..=BRUTE_MAX_GRID).contains(&grid) {
        return Err(Error::TooLarge(alloc::format!("{} grid points (allowed 2..={})", grid, BRUTE_MAX_GRID)));
    }
    Ok(())
}

/// Exhaustive search over `grid` evenly spaced values per variable; nodes
/// outside the polytope are skipped.
pub fn brute_force_opt(instance: &OnlineInstance, grid: usize) -> Result<OfflineSolution> {
    check_grid(instance, grid)?;
    let (n, m) = (instance.rows(), instance.steps());
    let poly = OfflinePolytope::new(instance)?;
    let ub = enclosing_box(instance)?;
    let step = 1.0 / (grid - 1) as f64;
    let mut idx = vec![0usize; n * m];
    let mut x = Matrix::zeros(n, m);
    let mut best = OfflineSolution { x: x.clone(), value: total_value(instance, &x)? };
    while odometer(&mut idx, grid) {
        let data: Vec<f64> = idx.iter().zip(&ub).map(|(&j, &b)| b * (j as f64 * step)).collect();
        x = Matrix::from_row_major(n, m, data)?;
        if !poly.contains(&x, 1e-12) {
            continue;
        }
        let value = total_value(instance, &x)?;
        if value > best.value {
            best = OfflineSolution { x: x.clone(), value };
        }
    }
    Ok(best)
}

/// Bound on `OPT − brute_force_opt(instance, grid)`: rounding an optimum down
/// to the grid loses at most `Σ_{i,t} ∇_t H_i(0) · h_{i,t}`.
pub fn brute_force_slack(instance: &OnlineInstance, grid: usize) -> Result<f64> {
    check_grid(instance, grid)?;
    let m = instance.steps();
    let ub = enclosing_box(instance)?;
    let mut slack = 0.0;
    for (i, obj) in instance.objectives().iter().enumerate() {
        let g0 = obj.grad(&vec![0.0; m])?;
        slack += g0.iter().zip(&ub[i * m..(i + 1) * m]).map(|(g, b)| g * b / (grid - 1) as f64).sum::<f64>();
    }
    Ok(slack)
}

/// `inf_{0 ⪯ x ⪯ range} ⟨x, y⟩ − H(x)` over `grid` points per coordinate.
pub fn conjugate(obj: &DrObjective, y: &[f64], range: &[f64], grid: usize) -> Result<f64> {
    let m = obj.dim();
    crate::error::check_len(m, y.len())?;
    crate::error::check_len(m, range.len())?;
    if grid < 2 {
        return Err(invalid!("conjugate grid needs at least 2 points"));
    }
    let nodes = u32::try_from(m).ok().and_then(|e| grid.checked_pow(e));
    if nodes.is_none_or(|v| v > CONJUGATE_MAX_NODES) {
        return Err(Error::TooLarge(alloc::format!("{}^{} conjugate grid nodes", grid, m)));
    }
    if range.iter().any(|r| !r.is_finite()) {
        return Err(invalid!("conjugate range must be bounded"));
    }
    let step = 1.0 / (grid - 1) as f64;
    let mut idx = vec![0usize; m];
    let mut x = vec![0.0; m];
    let mut best = -obj.eval(&x)?;
    while odometer(&mut idx, grid) {
        for t in 0..m {
            x[t] = range[t] * (idx[t] as f64 * step);
        }
        best = best.min(dot(&x, y) - obj.eval(&x)?);
    }
    Ok(best)
}

fn conjugate_ranges(instance: &OnlineInstance) -> Result<Vec<Vec<f64>>> {
    let m = instance.steps();
    let ub = enclosing_box(instance)?;
    Ok(ub.chunks(m.max(1)).map(<[f64]>::to_vec).take(instance.rows()).collect())
}

fn check_dual(instance: &OnlineInstance, dual: &DualPoint) -> Result<()> {
    let (n, m) = (instance.rows(), instance.steps());
    if dual.y.rows() != n || dual.y.cols() != m || dual.z.len() != n {
        return Err(invalid!("dual point shape does not match a {}x{} instance", n, m));
    }
    if dual.z.iter().any(|z| !z.is_finite() || *z < 0.0) || dual.y.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(invalid!("dual point must be finite with z ⪰ 0"));
    }
    Ok(())
}

/// `D(Y, z)` with each `H_i*` taken by grid search over the box enclosing the
/// feasible values of row `i`. The grid value of `H_i*` can only exceed the
/// exact one, by at most [`dual_slack`].
pub fn dual_objective(instance: &OnlineInstance, dual: &DualPoint, conjugate_grid: usize) -> Result<f64> {
    check_dual(instance, dual)?;
    let n = instance.rows();
    let mut value: f64 = dual.z.iter().sum();
    for (t, set) in instance.sets().iter().enumerate() {
        let arg: Vec<f64> = (0..n).map(|i| dual.y.get(i, t) - dual.z[i] * instance.costs().get(i, t)).collect();
        value += set.support(&arg);
    }
    for (i, range) in conjugate_ranges(instance)?.iter().enumerate() {
        value -= conjugate(&instance.objectives()[i], dual.y.row(i), range, conjugate_grid)?;
    }
    Ok(value)
}

/// Bound on `D_exact − dual_objective`: the nearest grid node is within half a
/// spacing per coordinate and `⟨x, y⟩ − H(x)` moves by at most
/// `|y_t| + ∇_t H(0)` per unit along coordinate `t`.
pub fn dual_slack(instance: &OnlineInstance, dual: &DualPoint, conjugate_grid: usize) -> Result<f64> {
    check_dual(instance, dual)?;
    if conjugate_grid < 2 {
        return Err(invalid!("conjugate grid needs at least 2 points"));
    }
    let m = instance.steps();
    let half = 0.5 / (conjugate_grid - 1) as f64;
    let mut slack = 0.0;
    for (i, range) in conjugate_ranges(instance)?.iter().enumerate() {
        let g0 = instance.objectives()[i].grad(&vec![0.0; m])?;
        slack += (0..m).map(|t| (dual.y.get(i, t).abs() + g0[t]) * range[t] * half).sum::<f64>();
    }
    Ok(slack)
}

/// `Σ_i ‖∇H_i(0)‖₁`, a Lipschitz bound for the total objective in the ∞-norm.
pub fn objective_lipschitz(instance: &OnlineInstance) -> Result<f64> {
    let m = instance.steps();
    instance.objectives().iter().map(|o| o.grad(&vec![0.0; m]).map(|g| norm1(&g))).sum()
}
