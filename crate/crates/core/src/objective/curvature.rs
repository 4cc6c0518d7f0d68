//! DR verification and curvature parameters (`α`, `κ`, smoothness).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DrObjective, SetFunctionTable};
use crate::error::{check_len, invalid, Error, Result};
use crate::math::dot;

const DR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DrViolation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub coord: usize,
    /// `∇_coord H(y) − ∇_coord H(x)`, positive on a violation.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrCheck {
    pub passed: bool,
    pub trials: usize,
    pub counterexample: Option<DrViolation>,
}

/// Samples ordered pairs `x ⪯ y` in the domain and checks `∇H(x) ⪰ ∇H(y)`.
///
/// Unbounded domain coordinates are sampled on `[0, 1]`. The tolerance is
/// `1e-9` scaled by the gradient magnitude.
pub fn check_dr(obj: &DrObjective, trials: usize, seed: u64) -> DrCheck {
    let sample_box: Vec<f64> = obj.domain_box().into_iter().map(|b| if b.is_finite() { b } else { 1.0 }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let y: Vec<f64> = sample_box.iter().map(|&b| b * rng.random::<f64>()).collect();
        let x: Vec<f64> =
            y.iter().map(|&yj| if rng.random::<f64>() < 0.2 { yj } else { yj * rng.random::<f64>() }).collect();
        let (gx, gy) = match (obj.grad(&x), obj.grad(&y)) {
            (Ok(gx), Ok(gy)) => (gx, gy),
            _ => continue,
        };
        for (coord, (a, b)) in gx.iter().zip(&gy).enumerate() {
            let excess = b - a;
            if excess > DR_TOL * (1.0 + a.abs().max(b.abs())) {
                return DrCheck {
                    passed: false,
                    trials: trial + 1,
                    counterexample: Some(DrViolation { x, y, coord, excess }),
                };
            }
        }
    }
    DrCheck { passed: true, trials, counterexample: None }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    /// Estimate of `inf ⟨∇H(u), u⟩ / H(u) − 1`, clamped to `[-1, 0]`. Sampling
    /// can only overestimate the infimum, so this is an upper bound on `α`.
    pub alpha: f64,
    /// Total curvature of the underlying set function (multilinear only).
    pub kappa: Option<f64>,
    pub witness: Vec<f64>,
    /// Unclamped `⟨∇H(u), u⟩ / H(u)` at the witness.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaOptions {
    pub grid_per_axis: usize,
    /// Dimensions up to this size are searched on a full grid; larger ones by sampling.
    pub max_grid_dim: usize,
    pub random_samples: usize,
    pub refinements: usize,
    pub seed: u64,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        Self { grid_per_axis: 25, max_grid_dim: 4, random_samples: 3000, refinements: 20, seed: 0x5eed }
    }
}

pub fn estimate_alpha(obj: &DrObjective, chat: &[f64]) -> Result<CurvatureReport> {
    estimate_alpha_with(obj, chat, &AlphaOptions::default())
}

/// Searches `{u ⪰ 0, u ≤ domain, ĉᵀu ≤ 1, H(u) > floor}` for the smallest
/// `⟨∇H(u), u⟩ / H(u)`: a full grid (or seeded samples in high dimension)
/// followed by pattern-search refinement of the best candidates.
pub fn estimate_alpha_with(obj: &DrObjective, chat: &[f64], opts: &AlphaOptions) -> Result<CurvatureReport> {
    let m = obj.dim();
    check_len(m, chat.len())?;
    if chat.iter().any(|&c| !c.is_finite() || c < 0.0) || chat.iter().all(|&c| c == 0.0) {
        return Err(invalid!("row costs must be nonnegative and not all zero"));
    }
    let upper: Vec<f64> =
        obj.domain_box().iter().zip(chat).map(|(&b, &c)| if c > 0.0 { b.min(1.0 / c) } else { b }).collect();
    if let Some(j) = upper.iter().position(|u| !u.is_finite()) {
        return Err(invalid!("coordinate {} is unbounded: zero cost and unbounded domain", j));
    }
    let corner_value = obj.eval(&upper)?;
    if corner_value <= 0.0 {
        return Err(Error::DegenerateObjective);
    }
    let search = AlphaSearch { obj, chat, upper: &upper, floor: 1e-9 * corner_value };

    let mut pool = CandidatePool::new(opts.refinements.max(1));
    if m <= opts.max_grid_dim {
        let g = opts.grid_per_axis.max(2);
        let mut idx = vec![0usize; m];
        loop {
            let u: Vec<f64> = idx.iter().zip(&upper).map(|(&i, &e)| e * i as f64 / (g - 1) as f64).collect();
            if dot(chat, &u) <= 1.0 + 1e-12 {
                if let Some(r) = search.ratio(&u) {
                    pool.offer(r, u);
                }
            }
            if !odometer(&mut idx, g) {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for j in 0..m {
            let mut u = vec![0.0; m];
            u[j] = upper[j];
            search.offer(&mut pool, u);
        }
        search.offer(&mut pool, upper.clone());
        for s in 0..opts.random_samples {
            let u = match s % 3 {
                0 => upper.iter().map(|&e| e * rng.random::<f64>()).collect(),
                1 => greedy_fill(chat, &upper, &mut rng),
                _ => upper
                    .iter()
                    .map(|&e| if rng.random::<f64>() < 0.3 { e * rng.random::<f64>() } else { 0.0 })
                    .collect(),
            };
            search.offer(&mut pool, u);
        }
    }

    let (mut best_ratio, mut best_u) = pool.best().ok_or(Error::DegenerateObjective)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa5a5);
    for (r, u) in pool.into_candidates() {
        let (r, u) = search.refine(r, u, &mut rng);
        if r < best_ratio {
            best_ratio = r;
            best_u = u;
        }
    }

    let kappa = match obj {
        DrObjective::Multilinear(ml) => total_curvature(ml.table()).ok(),
        _ => None,
    };
    Ok(CurvatureReport { alpha: (best_ratio - 1.0).clamp(-1.0, 0.0), kappa, witness: best_u, ratio: best_ratio })
}

struct AlphaSearch<'a> {
    obj: &'a DrObjective,
    chat: &'a [f64],
    upper: &'a [f64],
    floor: f64,
}

impl AlphaSearch<'_> {
    fn ratio(&self, u: &[f64]) -> Option<f64> {
        let h = self.obj.eval(u).ok()?;
        if h <= self.floor {
            return None;
        }
        let g = self.obj.grad(u).ok()?;
        Some(dot(&g, u) / h)
    }

    /// Clamps into the box, then scales back onto the budget if it is exceeded.
    fn project(&self, u: &mut [f64]) {
        for (v, &e) in u.iter_mut().zip(self.upper) {
            *v = v.clamp(0.0, e);
        }
        let load = dot(self.chat, u);
        if load > 1.0 {
            u.iter_mut().for_each(|v| *v /= load);
        }
    }

    fn offer(&self, pool: &mut CandidatePool, mut u: Vec<f64>) {
        self.project(&mut u);
        if let Some(r) = self.ratio(&u) {
            pool.offer(r, u);
        }
    }

    fn refine(&self, mut best: f64, mut u: Vec<f64>, rng: &mut ChaCha8Rng) -> (f64, Vec<f64>) {
        let m = u.len();
        let mut step = 0.25;
        let mut sweeps = 0;
        let exhaustive_pairs = m <= 8;
        while step > 1e-9 && sweeps < 400 {
            sweeps += 1;
            let mut improved = false;
            let try_move = |cand: &mut Vec<f64>, best: &mut f64, u: &mut Vec<f64>| {
                self.project(cand);
                if let Some(r) = self.ratio(cand) {
                    if r < *best - 1e-15 {
                        *best = r;
                        u.clone_from(cand);
                        return true;
                    }
                }
                false
            };
            for j in 0..m {
                for sign in [1.0, -1.0] {
                    let mut cand = u.clone();
                    cand[j] += sign * step * self.upper[j];
                    improved |= try_move(&mut cand, &mut best, &mut u);
                }
            }
            // budget-preserving exchanges between two coordinates
            let pairs: Vec<(usize, usize)> = if exhaustive_pairs {
                (0..m).flat_map(|j| (0..m).filter(move |&k| k != j).map(move |k| (j, k))).collect()
            } else {
                (0..4 * m).map(|_| (rng.random_range(0..m), rng.random_range(0..m))).filter(|(j, k)| j != k).collect()
            };
            for (j, k) in pairs {
                if self.chat[k] <= 0.0 {
                    continue;
                }
                let mut cand = u.clone();
                let delta = step * self.upper[j];
                cand[j] += delta;
                cand[k] -= delta * self.chat[j] / self.chat[k];
                improved |= try_move(&mut cand, &mut best, &mut u);
            }
            if !improved {
                step *= 0.5;
            }
        }
        (best, u)
    }
}

struct CandidatePool {
    cap: usize,
    items: Vec<(f64, Vec<f64>)>,
}

impl CandidatePool {
    fn new(cap: usize) -> Self {
        Self { cap, items: Vec::new() }
    }

    fn offer(&mut self, r: f64, u: Vec<f64>) {
        if self.items.len() < self.cap {
            self.items.push((r, u));
        } else if let Some(worst) = self.items.iter_mut().max_by(|a, b| a.0.total_cmp(&b.0)).filter(|w| r < w.0) {
            *worst = (r, u);
        }
    }

    fn best(&self) -> Option<(f64, Vec<f64>)> {
        self.items.iter().min_by(|a, b| a.0.total_cmp(&b.0)).cloned()
    }

    fn into_candidates(self) -> Vec<(f64, Vec<f64>)> {
        self.items
    }
}

fn greedy_fill(chat: &[f64], upper: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = chat.len();
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut u = vec![0.0; m];
    let mut room = 1.0;
    for j in order {
        if chat[j] == 0.0 {
            u[j] = upper[j];
        } else if room > 0.0 {
            u[j] = upper[j].min(room / chat[j]);
            room -= u[j] * chat[j];
        }
    }
    u
}

/// Advances a base-`g` counter; returns `false` after wrapping around.
pub(crate) fn odometer(idx: &mut [usize], g: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < g {
            return true;
        }
        *d = 0;
    }
    false
}

/// Total curvature `κ_f = 1 − min_j f(j | V∖j) / f({j})` over `j` with `f({j}) ≠ 0`.
pub fn total_curvature(f: &SetFunctionTable) -> Result<f64> {
    let full = f.full_mask();
    let min_ratio = (0..f.ground_size())
        .filter(|&j| f.value(1 << j) != 0.0)
        .map(|j| f.marginal(j, full & !(1 << j)) / f.value(1 << j))
        .min_by(f64::total_cmp)
        .ok_or(Error::DegenerateObjective)?;
    Ok((1.0 - min_ratio).clamp(0.0, 1.0))
}

/// Upper bound on the gradient Lipschitz constant (∞-norm of the Hessian).
///
/// Quadratic: max absolute row sum of the constant Hessian. Multilinear: the
/// Hessian entries are second differences of `f` at the cube vertices, where
/// the row sums of their magnitudes peak; all vertices are visited for ground
/// sets up to 14 elements and 4096 sampled vertices otherwise.
pub fn estimate_smoothness(obj: &DrObjective, domain_box: &[f64]) -> Result<f64> {
    check_len(obj.dim(), domain_box.len())?;
    Ok(match obj {
        DrObjective::Linear(_) => 0.0,
        DrObjective::Quadratic(q) => {
            let h = q.hessian();
            (0..h.rows()).map(|r| h.row(r).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
        }
        DrObjective::Multilinear(ml) => {
            let f = ml.table();
            let v = f.ground_size();
            let row_bound = |s: u32| -> f64 {
                (0..v)
                    .map(|a| {
                        (0..v)
                            .filter(|&b| b != a)
                            .map(|b| {
                                let base = s & !(1 << a) & !(1 << b);
                                (f.value(base | 1 << a | 1 << b) - f.value(base | 1 << a) - f.value(base | 1 << b)
                                    + f.value(base))
                                .abs()
                            })
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            };
            if v <= 14 {
                (0..1u32 << v).map(row_bound).fold(0.0, f64::max)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
                (0..4096).map(|_| row_bound(rng.random_range(0..1u32 << v))).fold(0.0, f64::max)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Matrix;
    use crate::objective::{LinearObjective, Multilinear, QuadraticDr};

    fn quad(rows: &[Vec<f64>], h: Vec<f64>) -> DrObjective {
        QuadraticDr::new(Matrix::from_rows(rows).unwrap(), h).unwrap().into()
    }

    #[test]
    fn dr_check_passes_nonpositive_quadratic() {
        let q = quad(&[vec![-1.0, -0.5], vec![-0.5, -2.0]], vec![3.0, 3.0]);
        assert!(check_dr(&q, 500, 1).passed);
        let lin: DrObjective = LinearObjective::new(vec![1.0, 2.0]).unwrap().into();
        assert!(check_dr(&lin, 500, 1).passed);
    }

    #[test]
    fn dr_check_finds_positive_mixed_partial() {
        let q = quad(&[vec![-1.0, 1.0], vec![1.0, -1.0]], vec![3.0, 3.0]);
        let res = check_dr(&q, 500, 7);
        assert!(!res.passed);
        let w = res.counterexample.unwrap();
        assert!(w.x.iter().zip(&w.y).all(|(a, b)| a <= b));
        let gx = q.grad(&w.x).unwrap();
        let gy = q.grad(&w.y).unwrap();
        assert!(gy[w.coord] > gx[w.coord]);
    }

    #[test]
    fn alpha_linear_is_zero() {
        let lin: DrObjective = LinearObjective::new(vec![1.0, 2.0, 0.5]).unwrap().into();
        let rep = estimate_alpha(&lin, &[1.0, 1.0, 2.0]).unwrap();
        assert!(rep.alpha.abs() < 1e-12);
    }

    #[test]
    fn alpha_coverage_pair() {
        let table = SetFunctionTable::new(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let ml: DrObjective = Multilinear::new(table).into();
        let rep = estimate_alpha(&ml, &[1.0, 1.0]).unwrap();
        assert!((rep.alpha + 1.0 / 3.0).abs() < 1e-9, "{rep:?}");
        assert_eq!(rep.kappa, Some(1.0));
    }

    #[test]
    fn alpha_one_dim_quadratic() {
        let q = quad(&[vec![-1.0]], vec![1.0]).into_quadratic_on_unit();
        let rep = estimate_alpha(&q, &[1.0]).unwrap();
        assert_eq!(rep.alpha, -1.0);
    }

    #[test]
    fn alpha_degenerate() {
        let lin: DrObjective = LinearObjective::new(vec![0.0, 0.0]).unwrap().into();
        assert_eq!(estimate_alpha(&lin, &[1.0, 1.0]), Err(Error::DegenerateObjective));
        let lin: DrObjective = LinearObjective::new(vec![1.0, 0.0]).unwrap().into();
        assert!(estimate_alpha(&lin, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn curvature_values() {
        let modular = SetFunctionTable::modular(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(total_curvature(&modular).unwrap(), 0.0);
        let cov = SetFunctionTable::new(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(total_curvature(&cov).unwrap(), 1.0);
        let zero = SetFunctionTable::new(1, vec![0.0, 0.0]).unwrap();
        assert!(total_curvature(&zero).is_err());
    }

    #[test]
    fn smoothness_values() {
        let q = quad(&[vec![-2.0, 0.0], vec![0.0, -1.0]], vec![5.0, 5.0]);
        assert_eq!(estimate_smoothness(&q, &[1.0, 1.0]).unwrap(), 2.0);
        let lin: DrObjective = LinearObjective::new(vec![1.0]).unwrap().into();
        assert_eq!(estimate_smoothness(&lin, &[1.0]).unwrap(), 0.0);
        // F = x1 + x2 - x1 x2 has Hessian [[0,-1],[-1,0]]
        let cov: DrObjective = Multilinear::new(SetFunctionTable::new(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap()).into();
        assert_eq!(estimate_smoothness(&cov, &[1.0, 1.0]).unwrap(), 1.0);
    }

    trait UnitBox {
        fn into_quadratic_on_unit(self) -> DrObjective;
    }

    impl UnitBox for DrObjective {
        fn into_quadratic_on_unit(self) -> DrObjective {
            match self {
                DrObjective::Quadratic(q) => {
                    let m = q.dim();
                    q.with_domain(vec![1.0; m]).unwrap().into()
                }
                other => other,
            }
        }
    }
}
