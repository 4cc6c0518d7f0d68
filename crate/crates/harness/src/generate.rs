//! Seeded instance families.

use drsub_core::error::Error;
use drsub_core::{
    DrObjective, FeasibleSet, LinearObjective, Matrix, Multilinear, OnlineInstance, QuadraticDr, Result,
    SetFunctionTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Family {
    QuadraticSec5,
    Adwords,
    OnlineLp,
    KnapsackSingle,
    WelfareSimplex,
    Gap,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::QuadraticSec5 => "quadratic_sec5",
            Family::Adwords => "adwords",
            Family::OnlineLp => "online_lp",
            Family::KnapsackSingle => "knapsack_single",
            Family::WelfareSimplex => "welfare_simplex",
            Family::Gap => "gap",
        }
    }

    /// Largest `m` for families whose objectives are multilinear in all steps.
    pub fn max_steps(self) -> Option<usize> {
        match self {
            Family::WelfareSimplex | Family::Gap => Some(16),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KnapsackValue {
    Linear,
    Multilinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Objective kind for `knapsack_single`.
    #[serde(default = "default_knapsack_value")]
    pub knapsack_value: KnapsackValue,
    /// Magnitude bound of the `quadratic_sec5` Hessian entries.
    #[serde(default = "default_entry_scale")]
    pub entry_scale: f64,
}

fn default_knapsack_value() -> KnapsackValue {
    KnapsackValue::Linear
}

fn default_entry_scale() -> f64 {
    100.0
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, m: usize, seed: u64) -> Self {
        Self { family, n, m, seed, knapsack_value: default_knapsack_value(), entry_scale: default_entry_scale() }
    }

    pub fn with_knapsack_value(mut self, kind: KnapsackValue) -> Self {
        self.knapsack_value = kind;
        self
    }
}

fn bad(msg: String) -> Error {
    Error::InvalidInput(msg)
}

pub fn generate(spec: &GeneratorSpec) -> Result<OnlineInstance> {
    let (n, m) = (spec.n, spec.m);
    if n == 0 || m == 0 {
        return Err(bad(format!("dimensions must be positive, got n={n}, m={m}")));
    }
    if let Some(max) = spec.family.max_steps() {
        if m > max {
            return Err(bad(format!("{} supports m ≤ {max}, got {m}", spec.family.name())));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.family {
        Family::QuadraticSec5 => quadratic_sec5(&mut rng, n, m, spec.entry_scale),
        Family::Adwords => adwords(&mut rng, n, m),
        Family::OnlineLp => online_lp(&mut rng, n, m),
        Family::KnapsackSingle => {
            if n != 1 {
                return Err(bad(format!("knapsack_single has exactly one row, got n={n}")));
            }
            knapsack_single(&mut rng, m, spec.knapsack_value)
        }
        Family::WelfareSimplex => welfare_simplex(&mut rng, n, m),
        Family::Gap => gap(&mut rng, n, m),
    }
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(lo..=hi)).collect();
    Matrix::from_row_major(rows, cols, data).expect("shape")
}

/// `H(x) = (x/2 − 1)ᵀ S x` with `S` symmetric, entries uniform in `[−scale, 0]`,
/// domain `[0, 1]^m`, costs uniform in `[0, 1]`, unit boxes.
fn quadratic_sec5(rng: &mut ChaCha8Rng, n: usize, m: usize, scale: f64) -> Result<OnlineInstance> {
    let mut objectives = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = Matrix::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let v = -rng.random_range(0.0..=scale);
                s.set(a, b, v);
                s.set(b, a, v);
            }
        }
        let h: Vec<f64> = (0..m).map(|t| -s.column(t).iter().sum::<f64>()).collect();
        objectives.push(QuadraticDr::new(s, h)?.with_domain(vec![1.0; m])?.into());
    }
    let costs = uniform_matrix(rng, n, m, 0.0, 1.0);
    OnlineInstance::new(costs, vec![FeasibleSet::unit_box(n); m], objectives)
}

/// `H_i(x̂_i) = ĉ_iᵀ x̂_i` with each query split over the advertisers.
fn adwords(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<OnlineInstance> {
    let costs = uniform_matrix(rng, n, m, 0.05, 1.0);
    let objectives =
        (0..n).map(|i| LinearObjective::new(costs.row(i).to_vec()).map(DrObjective::from)).collect::<Result<_>>()?;
    let set = FeasibleSet::scaled_simplex(n, 1.0)?;
    OnlineInstance::new(costs, vec![set; m], objectives)
}

/// Positive linear values with value-to-cost ratios in `[1, 4]`, unit boxes.
fn online_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<OnlineInstance> {
    let costs = uniform_matrix(rng, n, m, 0.05, 1.0);
    let budget_scale = 4.0 / m as f64;
    let costs = Matrix::from_row_major(n, m, costs.as_slice().iter().map(|c| c * budget_scale * n as f64).collect())?;
    let mut objectives = Vec::with_capacity(n);
    for i in 0..n {
        let v = costs.row(i).iter().map(|&c| c * rng.random_range(1.0..=4.0)).collect();
        objectives.push(LinearObjective::new(v)?.into());
    }
    OnlineInstance::new(costs, vec![FeasibleSet::unit_box(n); m], objectives)
}

/// One knapsack row. Linear values have ratios in `[1, e]`; the multilinear
/// variant is `√(wᵀ1_S)` over one item per step.
fn knapsack_single(rng: &mut ChaCha8Rng, m: usize, kind: KnapsackValue) -> Result<OnlineInstance> {
    let total: f64 = 3.0;
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..=1.0)).collect();
    let norm: f64 = raw.iter().sum();
    let costs: Vec<f64> = raw.iter().map(|c| c * total / norm).collect();
    let objective: DrObjective = match kind {
        KnapsackValue::Linear => {
            let v = costs.iter().map(|&c| c * rng.random_range(1.0..=std::f64::consts::E)).collect();
            LinearObjective::new(v)?.into()
        }
        KnapsackValue::Multilinear => {
            if m > 16 {
                return Err(bad(format!("multilinear knapsack supports m ≤ 16, got {m}")));
            }
            let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..=2.0)).collect();
            Multilinear::new(SetFunctionTable::concave_of_modular(&w)?).into()
        }
    };
    OnlineInstance::new(Matrix::from_row_major(1, m, costs)?, vec![FeasibleSet::unit_box(1); m], vec![objective])
}

/// Agents with coverage valuations over the items; no packing rows.
fn welfare_simplex(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<OnlineInstance> {
    let topics = 6;
    let mut objectives = Vec::with_capacity(n);
    for _ in 0..n {
        let weights: Vec<f64> = (0..topics).map(|_| rng.random_range(0.1..=1.0)).collect();
        let covers: Vec<u64> = (0..m).map(|_| rng.random_range(1..1u64 << topics)).collect();
        objectives.push(Multilinear::new(SetFunctionTable::coverage(&weights, &covers)?).into());
    }
    let set = FeasibleSet::scaled_simplex(n, 1.0)?;
    OnlineInstance::new(Matrix::zeros(n, m), vec![set; m], objectives)
}

/// Bins with concave-of-modular valuations and knapsack rows; every item is
/// split over the bins.
fn gap(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<OnlineInstance> {
    let costs = uniform_matrix(rng, n, m, 0.2, 0.6);
    let mut objectives = Vec::with_capacity(n);
    for _ in 0..n {
        let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..=2.0)).collect();
        objectives.push(Multilinear::new(SetFunctionTable::concave_of_modular(&w)?).into());
    }
    let set = FeasibleSet::scaled_simplex(n, 1.0)?;
    OnlineInstance::new(costs, vec![set; m], objectives)
}
