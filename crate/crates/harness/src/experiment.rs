//! Seeded experiments: the budgeted quadratic table, bound verification and
//! per-instance bound reports.

use std::time::Instant;

use drsub_core::engine::{run_online, EngineConfig, RunTrace};
use drsub_core::objective::{estimate_alpha, estimate_smoothness};
use drsub_core::offline::offline_fw;
use drsub_core::penalty::{compute_ul, theoretical_cr};
use drsub_core::{BoundReport, OnlineInstance, PenaltyModel, Regime, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{generate, Family, GeneratorSpec, KnapsackValue};
use crate::schema::BoundFile;

/// Source of the per-row `U_i`, `L_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RatioSource {
    /// Extrema of `∇_t H_i / c_{i,t}` over the budget polytope.
    Analytic,
    /// Extrema of `∇_t H_i / c_{i,t}` realized along a pilot run with analytic
    /// bounds.
    Trajectory,
}

/// Regime for an instance: no packing rows → absent, one row → single, else multi.
pub fn auto_regime(instance: &OnlineInstance) -> Regime {
    if (0..instance.rows()).all(|i| !instance.has_budget(i)) {
        Regime::Absent
    } else if instance.rows() == 1 {
        Regime::SingleConstraint
    } else {
        Regime::MultiConstraint
    }
}

/// Penalties with `U_i`, `L_i` computed from the instance.
pub fn auto_penalties(instance: &OnlineInstance, epsilon: f64) -> Result<Vec<PenaltyModel>> {
    let regime = auto_regime(instance);
    (0..instance.rows())
        .map(|i| {
            if regime == Regime::Absent || !instance.has_budget(i) {
                return Ok(PenaltyModel::absent());
            }
            let ul = compute_ul(&instance.objectives()[i], instance.row_costs(i), &instance.row_reach(i))?;
            PenaltyModel::new(regime, ul.upper, ul.lower, epsilon)
        })
        .collect()
}

/// Penalties from `source`. The trajectory variant runs the engine once with
/// analytic bounds and keeps the observed ratio extrema (never widening them).
pub fn penalties_from(
    instance: &OnlineInstance,
    source: RatioSource,
    k: usize,
    epsilon: f64,
) -> Result<Vec<PenaltyModel>> {
    let analytic = auto_penalties(instance, epsilon)?;
    if source == RatioSource::Analytic {
        return Ok(analytic);
    }
    let pilot = run_online(instance, &analytic, &EngineConfig::new(k))?;
    analytic
        .iter()
        .zip(&pilot.observed_ratios)
        .map(|(p, obs)| match (p.regime(), obs) {
            (Regime::Absent, _) | (_, None) => Ok(*p),
            (regime, Some((hi, lo))) => {
                let upper = hi.min(p.upper());
                let lower = lo.max(p.lower()).min(upper);
                PenaltyModel::new(regime, upper, lower, epsilon)
            }
        })
        .collect()
}

/// Slack margin absorbing baseline suboptimality and the finite-`K` term.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Theoretical bound for `penalties`, with the finite-`K` slack and (if given)
/// the empirical ratio `alg / opt` attached. `None` when no row has a budget.
pub fn bound_report(
    instance: &OnlineInstance,
    penalties: &[PenaltyModel],
    k: usize,
    empirical: Option<(f64, f64)>,
) -> Result<Option<BoundReport>> {
    let rows: Vec<usize> = (0..instance.rows()).filter(|&i| penalties[i].regime() != Regime::Absent).collect();
    let Some(&first) = rows.first() else {
        return Ok(None);
    };
    let regime = penalties[first].regime();
    let mut alphas = Vec::with_capacity(rows.len());
    let mut smooth: f64 = 0.0;
    for &i in &rows {
        let obj = &instance.objectives()[i];
        alphas.push(estimate_alpha(obj, instance.row_costs(i))?.alpha);
        smooth = smooth.max(estimate_smoothness(obj, &instance.row_reach(i))?);
    }
    let uppers: Vec<f64> = rows.iter().map(|&i| penalties[i].upper()).collect();
    let lowers: Vec<f64> = rows.iter().map(|&i| penalties[i].lower()).collect();
    let mut report = theoretical_cr(regime, &alphas, &uppers, &lowers, penalties[first].epsilon())?
        .with_finite_k_slack(smooth, instance.steps(), instance.max_radius(), k);
    if let Some((alg, opt)) = empirical {
        report = report.with_empirical(alg, opt);
    }
    Ok(Some(report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub alg: f64,
    pub opt_fw: f64,
    pub competitive_ratio: f64,
    pub budget_usage: Vec<f64>,
    pub max_load: f64,
    pub feasible: bool,
    pub p_gseq: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableResult {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub records: Vec<SeedRecord>,
    pub mean_cr: f64,
    pub std_cr: f64,
    pub mean_usage: Vec<f64>,
    pub std_usage: Vec<f64>,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// One seed of the budgeted quadratic experiment: generate, run online, run
/// the offline baseline with the same `K`.
pub fn table_seed(n: usize, m: usize, k: usize, seed: u64, source: RatioSource) -> Result<SeedRecord> {
    let start = Instant::now();
    let inst = generate(&GeneratorSpec::new(Family::QuadraticSec5, n, m, seed))?;
    let penalties = penalties_from(&inst, source, k, 0.0)?;
    let trace = run_online(&inst, &penalties, &EngineConfig::new(k))?;
    let opt = offline_fw(&inst, k)?;
    Ok(SeedRecord {
        seed,
        alg: trace.alg,
        opt_fw: opt.value,
        competitive_ratio: trace.alg / opt.value,
        budget_usage: trace.loads.clone(),
        max_load: trace.loads.iter().copied().fold(0.0, f64::max),
        feasible: feasible(&inst, &trace),
        p_gseq: trace.p_gseq,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub(crate) fn feasible(inst: &OnlineInstance, trace: &RunTrace) -> bool {
    trace.loads.iter().all(|&l| l <= 1.0 + 1e-12)
        && inst.sets().iter().enumerate().all(|(t, s)| s.contains(&trace.allocations.column(t), 1e-12))
}

/// Seeds `0..seeds` in parallel, aggregated in seed order.
pub fn reproduce_table1(n: usize, m: usize, seeds: usize, k: usize, source: RatioSource) -> Result<TableResult> {
    let records =
        (0..seeds as u64).into_par_iter().map(|s| table_seed(n, m, k, s, source)).collect::<Result<Vec<_>>>()?;
    let (mean_cr, std_cr) = mean_std(records.iter().map(|r| r.competitive_ratio));
    let (mean_usage, std_usage) = (0..n).map(|i| mean_std(records.iter().map(|r| r.budget_usage[i]))).unzip();
    Ok(TableResult { n, m, k, records, mean_cr, std_cr, mean_usage, std_usage })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// No packing rows, so no bound applies.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub spec: GeneratorSpec,
    pub alg: f64,
    pub opt_fw: f64,
    pub uppers: Vec<f64>,
    pub lowers: Vec<f64>,
    pub bound: Option<BoundFile>,
    pub max_load: f64,
    pub feasible: bool,
    pub p_gseq: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: Family,
    pub k: usize,
    pub margin: f64,
    pub records: Vec<VerifyRecord>,
}

impl VerifyReport {
    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn all_passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }
}

/// Default dimensions of the verification instances for each family.
pub fn verify_spec(family: Family, seed: u64) -> GeneratorSpec {
    let even = seed.is_multiple_of(2);
    match family {
        Family::QuadraticSec5 => GeneratorSpec::new(family, if even { 1 } else { 5 }, 20, seed),
        Family::Adwords | Family::OnlineLp => GeneratorSpec::new(family, 3, 20, seed),
        Family::KnapsackSingle => GeneratorSpec::new(family, 1, 12, seed).with_knapsack_value(if even {
            KnapsackValue::Linear
        } else {
            KnapsackValue::Multilinear
        }),
        Family::WelfareSimplex | Family::Gap => GeneratorSpec::new(family, 3, 8, seed),
    }
}

/// Runs one instance and checks `ALG / OPT_fw ≥ theoretical_cr · (1 − margin)`
/// together with hard feasibility.
pub fn verify_instance(spec: &GeneratorSpec, k: usize, margin: f64) -> Result<VerifyRecord> {
    let inst = generate(spec)?;
    let penalties = auto_penalties(&inst, 0.0)?;
    let trace = run_online(&inst, &penalties, &EngineConfig::new(k))?;
    let opt = offline_fw(&inst, k)?;
    let report = bound_report(&inst, &penalties, k, Some((trace.alg, opt.value)))?;
    let ok_feasible = feasible(&inst, &trace);
    let status = match &report {
        None => Status::Skipped,
        Some(r) if r.satisfied(margin) == Some(true) && ok_feasible => Status::Pass,
        Some(_) => Status::Fail,
    };
    Ok(VerifyRecord {
        spec: spec.clone(),
        alg: trace.alg,
        opt_fw: opt.value,
        uppers: penalties.iter().map(PenaltyModel::upper).collect(),
        lowers: penalties.iter().map(PenaltyModel::lower).collect(),
        bound: report.as_ref().map(BoundFile::from),
        max_load: trace.loads.iter().copied().fold(0.0, f64::max),
        feasible: ok_feasible,
        p_gseq: trace.p_gseq,
        status,
    })
}

/// `trials` instances of `family` with seeds `seed, seed + 1, …`.
pub fn verify_bounds(family: Family, trials: usize, k: usize, seed: u64, margin: f64) -> Result<VerifyReport> {
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|j| verify_instance(&verify_spec(family, seed + j), k, margin))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { family, k, margin, records })
}
