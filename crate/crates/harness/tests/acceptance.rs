//! Acceptance checks. Prints one line per criterion and exits non-zero if any fails.

use std::f64::consts::E;
use std::time::Instant;

use drsub_core::engine::{run_online, EngineConfig};
use drsub_core::objective::{estimate_alpha, total_curvature};
use drsub_core::offline::{brute_force_opt, brute_force_slack, dual_objective, dual_slack, offline_fw};
use drsub_core::penalty::theoretical_cr;
use drsub_core::{
    DrObjective, FeasibleSet, LinearObjective, Matrix, Multilinear, OnlineInstance, PenaltyModel, QuadraticDr, Regime,
    SetFunctionTable,
};
use drsub_harness::experiment::{
    auto_penalties, reproduce_table1, verify_instance, verify_spec, RatioSource, Status, TableResult, VerifyRecord,
};
use drsub_harness::generate::{generate, Family, GeneratorSpec};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn in_band(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn table_reproduction(t1: &TableResult, t5: &TableResult) -> Outcome {
    let ok1 = in_band(t1.mean_cr, 0.54, 0.74) && in_band(t1.mean_usage[0], 0.65, 0.85);
    let ok5 = in_band(t5.mean_cr, 0.48, 0.68) && t5.mean_usage.iter().all(|&u| in_band(u, 0.48, 0.85));
    let usage5: Vec<String> = t5.mean_usage.iter().map(|u| format!("{:.2}", 100.0 * u)).collect();
    outcome(
        ok1 && ok5,
        format!(
            "n=1 cr {:.2}% usage {:.2}%; n=5 cr {:.2}% usage [{}]%",
            100.0 * t1.mean_cr,
            100.0 * t1.mean_usage[0],
            100.0 * t5.mean_cr,
            usage5.join(", ")
        ),
    )
}

fn multi_closed_form(alphas: &[f64], u: &[f64], l: &[f64]) -> f64 {
    let worst = (0..alphas.len())
        .map(|i| -alphas[i] + (1.0 + u[i] * (E - 1.0) / l[i]).ln() * E / (E - 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    1.0 / worst
}

fn single_closed_form(alpha: f64, u: f64, l: f64) -> f64 {
    1.0 / (1.0 - alpha + (u / l).ln())
}

fn bound_values() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1, 3, 7] {
        for u in [0.5, 1.0, 4.0] {
            let r = theoretical_cr(Regime::MultiConstraint, &vec![0.0; n], &vec![u; n], &vec![u; n], 0.0).unwrap();
            worst = worst.max((r.theoretical_cr - (1.0 - 1.0 / E)).abs());
        }
    }
    for (u, l) in [(1.0, 1.0), (E, 1.0), (10.0, 2.0), (123.0, 0.5)] {
        let r = theoretical_cr(Regime::SingleConstraint, &[0.0], &[u], &[l], 0.0).unwrap();
        worst = worst.max((r.theoretical_cr - 1.0 / (1.0 + (u / l).ln())).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.random_range(1..5);
        let alphas: Vec<f64> = (0..n).map(|_| -rng.random::<f64>()).collect();
        let l: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let u: Vec<f64> = l.iter().map(|x| x * rng.random_range(1.0..50.0)).collect();
        let r = theoretical_cr(Regime::MultiConstraint, &alphas, &u, &l, 0.0).unwrap();
        worst = worst.max((r.theoretical_cr - multi_closed_form(&alphas, &u, &l)).abs());
        let r = theoretical_cr(Regime::SingleConstraint, &alphas[..1], &u[..1], &l[..1], 0.0).unwrap();
        worst = worst.max((r.theoretical_cr - single_closed_form(alphas[0], u[0], l[0])).abs());
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e}"))
}

fn penalty_correctness() -> Outcome {
    let mut failures = Vec::new();
    let mut max_fd: f64 = 0.0;
    let cases = [(1.0, 1.0), (2.0 * E, 2.0), (5.0, 1.0), (40.0, 0.7), (E, 1.0)];
    for &(u, l) in &cases {
        for p in [PenaltyModel::multi(u, l).unwrap(), PenaltyModel::single(u, l).unwrap()] {
            let tag = format!("{:?} U={u} L={l}", p.regime());
            if p.value(0.0).unwrap() != 0.0 {
                failures.push(format!("{tag}: G(0) != 0"));
            }
            if (p.derivative(1.0).unwrap() + u).abs() > 1e-9 * u.max(1.0) {
                failures.push(format!("{tag}: G'(1) = {}", p.derivative(1.0).unwrap()));
            }
            let kink = p.threshold();
            if let Some(theta) = kink {
                let beta = (u * E / l).ln();
                for j in 0..=1000 {
                    let x = theta + (1.2 - theta) * j as f64 / 1000.0;
                    let (g, dg) = (p.value(x).unwrap(), p.derivative(x).unwrap());
                    if (dg - beta * g).abs() > 1e-12 * dg.abs().max(1.0) {
                        failures.push(format!("{tag}: identity off at u={x}"));
                        break;
                    }
                }
            }
            let h = 1e-5;
            for j in 1..400 {
                let x = 1.2 * j as f64 / 400.0;
                if kink.is_some_and(|t| (x - t).abs() < 10.0 * h) {
                    continue;
                }
                let fd = (p.value(x + h).unwrap() - p.value(x - h).unwrap()) / (2.0 * h);
                let dg = p.derivative(x).unwrap();
                let rel = (fd - dg).abs() / dg.abs().max(1.0);
                max_fd = max_fd.max(rel);
            }
            let grid = 10_000;
            let step = 1.0 / grid as f64;
            let vals: Vec<f64> = (0..=grid).map(|j| p.value(j as f64 * step).unwrap()).collect();
            let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if vals.windows(3).any(|w| w[0] - 2.0 * w[1] + w[2] > 1e-12 * scale) {
                failures.push(format!("{tag}: concavity violated on the grid"));
            }
        }
    }
    if max_fd > 1e-7 {
        failures.push(format!("finite-difference error {max_fd:.2e}"));
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} penalties, max FD error {max_fd:.2e}", 2 * cases.len())
        } else {
            failures.join("; ")
        },
    )
}

fn objective_zoo() -> Vec<(&'static str, DrObjective)> {
    let sec5 = generate(&GeneratorSpec::new(Family::QuadraticSec5, 1, 10, 4)).unwrap();
    let gap = generate(&GeneratorSpec::new(Family::Gap, 2, 8, 1)).unwrap();
    let welfare = generate(&GeneratorSpec::new(Family::WelfareSimplex, 2, 7, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 6;
    let mut s = Matrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            s.set(a, b, -rng.random_range(0.0..2.0));
        }
    }
    let h: Vec<f64> = (0..m).map(|t| (0..m).map(|c| -0.5 * (s.get(t, c) + s.get(c, t))).sum::<f64>() + 0.5).collect();
    let quad = QuadraticDr::new(s, h).unwrap().with_domain(vec![1.0; m]).unwrap();
    vec![
        ("quadratic_sec5", sec5.objectives()[0].clone()),
        ("asymmetric quadratic", quad.into()),
        ("linear", LinearObjective::new(vec![0.3, 1.2, 0.0, 2.5]).unwrap().into()),
        ("gap bin", gap.objectives()[0].clone()),
        ("coverage", welfare.objectives()[1].clone()),
        (
            "concave of modular",
            Multilinear::new(SetFunctionTable::concave_of_modular(&[0.4, 1.0, 2.0, 0.7, 1.5]).unwrap()).into(),
        ),
    ]
}

fn unit_box(obj: &DrObjective) -> Vec<f64> {
    obj.domain_box().iter().map(|b| b.min(1.0)).collect()
}

fn objective_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut violations = 0usize;
    let h = 1e-6;
    for (name, obj) in objective_zoo() {
        let bx = unit_box(&obj);
        let m = obj.dim();
        for _ in 0..100 {
            let x: Vec<f64> = bx.iter().map(|b| rng.random_range(2.0 * h..b - 2.0 * h)).collect();
            let g = obj.grad(&x).unwrap();
            for t in 0..m {
                let (mut a, mut b) = (x.clone(), x.clone());
                a[t] += h;
                b[t] -= h;
                let fd = (obj.eval(&a).unwrap() - obj.eval(&b).unwrap()) / (2.0 * h);
                max_rel = max_rel.max((fd - g[t]).abs() / g[t].abs().max(1.0));
            }
        }
        for _ in 0..1000 {
            let y: Vec<f64> = bx.iter().map(|b| rng.random_range(0.0..=*b)).collect();
            let x: Vec<f64> = y.iter().map(|v| v * rng.random::<f64>()).collect();
            let (gx, gy) = (obj.grad(&x).unwrap(), obj.grad(&y).unwrap());
            let scale = gx.iter().chain(&gy).fold(1.0f64, |a, v| a.max(v.abs()));
            violations += gx.iter().zip(&gy).filter(|(a, b)| **b > **a + 1e-12 * scale).count();
        }
        if let DrObjective::Multilinear(ml) = &obj {
            let table = ml.table();
            for mask in 0..=table.full_mask() {
                let x: Vec<f64> = (0..m).map(|j| f64::from((mask >> j) & 1)).collect();
                if obj.eval(&x).unwrap() != table.value(mask) {
                    failures.push(format!("{name}: F(1_S) != f(S) at mask {mask}"));
                }
            }
        }
    }
    if max_rel > 1e-6 {
        failures.push(format!("gradient relative error {max_rel:.2e}"));
    }
    if violations > 0 {
        failures.push(format!("{violations} DR violations"));
    }
    let ok = failures.is_empty();
    outcome(
        ok,
        if ok {
            format!("6 objectives, max gradient error {max_rel:.2e}, 0 DR violations")
        } else {
            failures.join("; ")
        },
    )
}

fn random_submodular(rng: &mut ChaCha8Rng, v: usize) -> SetFunctionTable {
    let topics = rng.random_range(2..8);
    let weights: Vec<f64> = (0..topics).map(|_| rng.random_range(0.1..1.0)).collect();
    let covers: Vec<u64> = (0..v).map(|_| rng.random_range(1..1u64 << topics)).collect();
    let cov = SetFunctionTable::coverage(&weights, &covers).unwrap();
    let w: Vec<f64> = (0..v).map(|_| rng.random_range(0.1..2.0)).collect();
    let cap = rng.random_range(0.5..(w.iter().sum::<f64>()));
    let mix = rng.random::<f64>();
    SetFunctionTable::from_fn(v, |s| {
        let total: f64 = (0..v).filter(|j| s >> j & 1 == 1).map(|j| w[j]).sum();
        mix * cov.value(s) + (1.0 - mix) * total.min(cap)
    })
    .unwrap()
}

/// `inf ⟨∇F(u), u⟩ / F(u) − 1` over a grid of `{u ∈ [0,1]², u₁ + u₂ ≤ 1}`.
fn grid_alpha_pair(obj: &DrObjective) -> f64 {
    let g = 400;
    let mut best = f64::INFINITY;
    for a in 0..=g {
        for b in 0..=(g - a) {
            let u = [a as f64 / g as f64, b as f64 / g as f64];
            let f = obj.eval(&u).unwrap();
            if f > 1e-9 {
                let grad = obj.grad(&u).unwrap();
                best = best.min((grad[0] * u[0] + grad[1] * u[1]) / f - 1.0);
            }
        }
    }
    best
}

fn curvature_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for j in 0..24 {
        let v = 2 + j % 7;
        let table = random_submodular(&mut rng, v);
        if !(table.is_monotone(1e-12) && table.is_submodular(1e-12)) {
            failures.push(format!("table {j} is not monotone submodular"));
            continue;
        }
        let kappa = total_curvature(&table).unwrap();
        let chat: Vec<f64> = (0..v).map(|_| rng.random_range(0.1..1.0)).collect();
        let alpha = estimate_alpha(&Multilinear::new(table).into(), &chat).unwrap().alpha;
        tightest = tightest.min(alpha + kappa);
        if alpha < -kappa - 1e-6 {
            failures.push(format!("table {j}: alpha {alpha} < -kappa {}", -kappa));
        }
    }
    let cov = SetFunctionTable::new(2, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
    let kappa = total_curvature(&cov).unwrap();
    let obj: DrObjective = Multilinear::new(cov).into();
    let oracle = grid_alpha_pair(&obj);
    let alpha = estimate_alpha(&obj, &[1.0, 1.0]).unwrap().alpha;
    if (oracle + 1.0 / 3.0).abs() > 1e-9 || (alpha - oracle).abs() > 1e-6 || kappa != 1.0 {
        failures.push(format!("coverage example: alpha {alpha}, grid {oracle}, kappa {kappa}"));
    }
    let ok = failures.is_empty();
    outcome(
        ok,
        if ok {
            format!("24 tables, min(alpha + kappa) {tightest:.4}; coverage alpha {alpha:.6} kappa {kappa}")
        } else {
            failures.join("; ")
        },
    )
}

struct RunCheck {
    label: String,
    max_load: f64,
    feasible: bool,
    multi: bool,
    p_gseq: f64,
}

fn feasibility(runs: &[RunCheck]) -> Outcome {
    let bad: Vec<&RunCheck> =
        runs.iter().filter(|r| !r.feasible || r.max_load > 1.0 + 1e-12 || (r.multi && r.p_gseq < 0.0)).collect();
    let max_load = runs.iter().map(|r| r.max_load).fold(0.0, f64::max);
    let min_p = runs.iter().filter(|r| r.multi).map(|r| r.p_gseq).fold(f64::INFINITY, f64::min);
    let names: Vec<&str> = bad.iter().map(|r| r.label.as_str()).collect();
    outcome(
        bad.is_empty(),
        format!(
            "{} runs, max load {max_load:.15}, min multi P_gseq {min_p:.4e}{}",
            runs.len(),
            if bad.is_empty() { String::new() } else { format!(", failing: {}", names.join(", ")) }
        ),
    )
}

/// Tiny instances with `n·m ≤ 6` mixing objective kinds and set shapes.
fn tiny_instances() -> Vec<OnlineInstance> {
    let shapes = [(1, 2), (1, 3), (2, 2), (1, 4), (2, 3), (3, 2), (1, 5), (1, 6), (2, 2), (3, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    shapes
        .iter()
        .enumerate()
        .map(|(j, &(n, m))| {
            let costs = Matrix::from_row_major(n, m, (0..n * m).map(|_| rng.random_range(0.3..1.2)).collect()).unwrap();
            let objectives = (0..n)
                .map(|i| -> DrObjective {
                    match (j + i) % 3 {
                        0 => LinearObjective::new((0..m).map(|_| rng.random_range(0.2..2.0)).collect()).unwrap().into(),
                        1 => {
                            let mut s = Matrix::zeros(m, m);
                            for a in 0..m {
                                for b in a..m {
                                    let v = -rng.random_range(0.0..1.0);
                                    s.set(a, b, v);
                                    s.set(b, a, v);
                                }
                            }
                            let h =
                                (0..m).map(|t| -s.row(t).iter().sum::<f64>() + rng.random_range(0.1..0.5)).collect();
                            QuadraticDr::new(s, h).unwrap().with_domain(vec![1.0; m]).unwrap().into()
                        }
                        _ => {
                            let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.3..2.0)).collect();
                            Multilinear::new(SetFunctionTable::concave_of_modular(&w).unwrap()).into()
                        }
                    }
                })
                .collect();
            let set = if n > 1 && j % 2 == 0 {
                FeasibleSet::scaled_simplex(n, 1.0).unwrap()
            } else {
                FeasibleSet::unit_box(n)
            };
            OnlineInstance::new(costs, vec![set; m], objectives).unwrap()
        })
        .collect()
}

fn brute_grid(vars: usize) -> usize {
    (2..=21).rev().find(|g| (*g as f64).powi(vars as i32) <= 2e5).unwrap()
}

fn conjugate_grid(m: usize) -> usize {
    (2..=41).rev().find(|g| (*g as f64).powi(m as i32) <= 2e5).unwrap()
}

fn weak_duality(tiny: &[OnlineInstance], runs: &mut Vec<RunCheck>) -> Outcome {
    let mut violations = Vec::new();
    let mut min_gap = f64::INFINITY;
    for (j, inst) in tiny.iter().enumerate() {
        let p = auto_penalties(inst, 0.0).unwrap();
        let trace = run_online(inst, &p, &EngineConfig::new(200)).unwrap();
        runs.push(RunCheck {
            label: format!("tiny {j}"),
            max_load: trace.loads.iter().copied().fold(0.0, f64::max),
            feasible: (0..inst.steps()).all(|t| inst.sets()[t].contains(&trace.allocations.column(t), 1e-12)),
            multi: p[0].regime() == Regime::MultiConstraint,
            p_gseq: trace.p_gseq,
        });
        let brute = brute_force_opt(inst, brute_grid(inst.rows() * inst.steps())).unwrap();
        let g = conjugate_grid(inst.steps());
        let dual = dual_objective(inst, &trace.dual, g).unwrap();
        let slack = dual_slack(inst, &trace.dual, g).unwrap();
        min_gap = min_gap.min(dual + slack - brute.value);
        if brute.value > dual + slack {
            violations.push(format!("instance {j}: brute {} > dual {} + {}", brute.value, dual, slack));
        }
    }
    outcome(
        violations.is_empty(),
        if violations.is_empty() {
            format!("{} instances, min(dual + slack - brute) {min_gap:.4}", tiny.len())
        } else {
            violations.join("; ")
        },
    )
}

fn lp_optimum(inst: &OnlineInstance) -> f64 {
    let (n, m) = (inst.rows(), inst.steps());
    let mut pb = Problem::new(OptimizationDirection::Maximize);
    let mut vars = Vec::with_capacity(n * m);
    for i in 0..n {
        let DrObjective::Linear(l) = &inst.objectives()[i] else { panic!("linear instance expected") };
        for t in 0..m {
            let ub = match &inst.sets()[t] {
                FeasibleSet::Box { bounds, .. } => bounds[i],
                FeasibleSet::Simplex { scale, .. } => *scale,
            };
            vars.push(pb.add_var(l.coefficients()[t], (0.0, ub)));
        }
    }
    for i in 0..n {
        let row: Vec<_> = (0..m).map(|t| (vars[i * m + t], inst.costs().get(i, t))).collect();
        pb.add_constraint(row.as_slice(), ComparisonOp::Le, 1.0);
    }
    for (t, set) in inst.sets().iter().enumerate() {
        if let FeasibleSet::Simplex { scale, .. } = set {
            let row: Vec<_> = (0..n).map(|i| (vars[i * m + t], 1.0)).collect();
            pb.add_constraint(row.as_slice(), ComparisonOp::Le, *scale);
        }
    }
    pb.solve().unwrap().objective()
}

fn baseline_cross_validation(tiny: &[OnlineInstance]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst_grid: f64 = f64::NEG_INFINITY;
    for (j, inst) in tiny.iter().enumerate() {
        let g = brute_grid(inst.rows() * inst.steps());
        let brute = brute_force_opt(inst, g).unwrap();
        let slack = brute_force_slack(inst, g).unwrap();
        let fw = offline_fw(inst, 500).unwrap();
        let excess = (fw.value - brute.value).abs() - slack;
        worst_grid = worst_grid.max(excess);
        if excess > 1e-9 {
            failures.push(format!("tiny {j}: fw {:.6} brute {:.6} slack {:.2e}", fw.value, brute.value, slack));
        }
    }
    let mut worst_lp: f64 = 0.0;
    let linear_specs = (0..4)
        .map(|s| verify_spec(Family::OnlineLp, s))
        .chain((0..4).map(|s| verify_spec(Family::Adwords, s)))
        .chain((0..8).step_by(2).map(|s| verify_spec(Family::KnapsackSingle, s)));
    for spec in linear_specs {
        let inst = generate(&spec).unwrap();
        let exact = lp_optimum(&inst);
        let fw = offline_fw(&inst, 500).unwrap().value;
        let rel = (fw - exact).abs() / exact.abs().max(1e-12);
        worst_lp = worst_lp.max(rel);
        if rel > 1e-6 {
            failures.push(format!("{} seed {}: fw {fw} lp {exact}", spec.family.name(), spec.seed));
        }
    }
    let ok = failures.is_empty();
    outcome(
        ok,
        if ok {
            format!("{} tiny instances within grid bound (worst excess {worst_grid:.2e}); 12 linear instances, max rel LP error {worst_lp:.2e}", tiny.len())
        } else {
            failures.join("; ")
        },
    )
}

fn bound_suite() -> Vec<VerifyRecord> {
    use rayon::prelude::*;
    let specs: Vec<GeneratorSpec> = (0..12)
        .map(|s| verify_spec(Family::Adwords, s))
        .chain((0..12).map(|s| verify_spec(Family::OnlineLp, s)))
        .chain((0..13).map(|s| verify_spec(Family::KnapsackSingle, s)))
        .chain((0..13).map(|s| verify_spec(Family::QuadraticSec5, s)))
        .collect();
    specs.par_iter().map(|s| verify_instance(s, 1000, 0.05).unwrap()).collect()
}

fn bound_satisfaction(records: &[VerifyRecord]) -> Outcome {
    let failing: Vec<String> = records
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| format!("{} seed {}", r.spec.family.name(), r.spec.seed))
        .collect();
    let tightest = records
        .iter()
        .filter_map(|r| r.bound.as_ref())
        .map(|b| b.empirical_cr.unwrap() / b.theoretical_cr)
        .fold(f64::INFINITY, f64::min);
    outcome(
        failing.is_empty() && records.len() == 50,
        format!(
            "{} instances, min empirical/theoretical {tightest:.3}{}",
            records.len(),
            if failing.is_empty() { String::new() } else { format!(", failing: {}", failing.join(", ")) }
        ),
    )
}

fn main() {
    let start = Instant::now();
    let tiny = tiny_instances();
    let ((t1, t5), suite) = rayon::join(
        || {
            (
                reproduce_table1(1, 100, 10, 50, RatioSource::Analytic).unwrap(),
                reproduce_table1(5, 100, 10, 50, RatioSource::Analytic).unwrap(),
            )
        },
        bound_suite,
    );
    let mut runs: Vec<RunCheck> = Vec::new();
    for (t, regime_multi) in [(&t1, false), (&t5, true)] {
        runs.extend(t.records.iter().map(|r| RunCheck {
            label: format!("table n={} seed {}", t.n, r.seed),
            max_load: r.max_load,
            feasible: r.feasible,
            multi: regime_multi,
            p_gseq: r.p_gseq,
        }));
    }
    runs.extend(suite.iter().map(|r| RunCheck {
        label: format!("{} seed {}", r.spec.family.name(), r.spec.seed),
        max_load: r.max_load,
        feasible: r.feasible,
        multi: r.spec.n > 1,
        p_gseq: r.p_gseq,
    }));
    let c8 = weak_duality(&tiny, &mut runs);
    let results = [
        ("table reproduction", table_reproduction(&t1, &t5)),
        ("exact bound values", bound_values()),
        ("bound satisfaction", bound_satisfaction(&suite)),
        ("penalty correctness", penalty_correctness()),
        ("objective correctness", objective_correctness()),
        ("curvature relation", curvature_relation()),
        ("feasibility", feasibility(&runs)),
        ("weak duality", c8),
        ("baseline cross-validation", baseline_cross_validation(&tiny)),
    ];
    let mut failed = 0;
    for (j, (name, o)) in results.iter().enumerate() {
        println!("criterion {} {name}: {} ({})", j + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria pass in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
