use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use drsub_core::engine::{evaluate_trace, run_online, EngineConfig, OvershootPolicy};
use drsub_core::offline::offline_fw;
use drsub_harness::experiment::{
    bound_report, penalties_from, reproduce_table1, verify_bounds, RatioSource, Status, TableResult, DEFAULT_MARGIN,
};
use drsub_harness::generate::{generate, Family, GeneratorSpec, KnapsackValue};
use drsub_harness::schema::{
    read_json, to_models, write_json, BoundFile, EvaluationFile, InstanceFile, PenaltyFile, ReportFile, TraceFile,
};

#[derive(Parser)]
#[command(name = "drsub", about = "Online DR-submodular maximization under packing constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Overshoot {
    Cap,
    Raw,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded instance as JSON.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "linear")]
        knapsack_value: KnapsackValue,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the online algorithm on an instance and write the trace.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long = "K", alias = "k", default_value_t = 50)]
        k: usize,
        /// `auto` or a JSON penalty file.
        #[arg(long, default_value = "auto")]
        penalty: String,
        #[arg(long, value_enum, default_value = "analytic")]
        ratio_source: RatioSource,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "cap")]
        overshoot: Overshoot,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute a trace's value and compare it with the theoretical bound.
    Bounds {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Budgeted random quadratics: mean competitive ratio and budget usage.
    #[command(name = "reproduce-table1")]
    ReproduceTable1 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long = "K", alias = "k", default_value_t = 50)]
        k: usize,
        #[arg(long, value_enum, default_value = "analytic")]
        ratio_source: RatioSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check empirical ratios against the theoretical bound on seeded instances.
    Verify {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long = "K", alias = "k", default_value_t = 1000)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Assertion(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { family, n, m, seed, knapsack_value, out } => {
            let spec = GeneratorSpec::new(family, n, m, seed).with_knapsack_value(knapsack_value);
            let inst = generate(&spec)?;
            write_json(&out, &InstanceFile::from_instance(&inst, Some(spec)))?;
            println!("wrote {} ({}x{})", out.display(), n, m);
        }
        Command::Run { instance, k, penalty, ratio_source, epsilon, overshoot, out } => {
            let inst = read_json::<InstanceFile>(&instance)?.to_instance()?;
            let penalties = if penalty == "auto" {
                penalties_from(&inst, ratio_source, k, epsilon)?
            } else {
                let file: PenaltyFile = read_json(&PathBuf::from(&penalty))?;
                to_models(&file.penalties)?
            };
            let policy = match overshoot {
                Overshoot::Cap => OvershootPolicy::CapFinalMicrostep,
                Overshoot::Raw => OvershootPolicy::AllowRaw,
            };
            let trace = run_online(&inst, &penalties, &EngineConfig::new(k).with_overshoot(policy))?;
            write_json(&out, &TraceFile::from_trace(&trace, &penalties))?;
            println!("ALG {:.6}  P_gseq {:.6}  loads {:?}", trace.alg, trace.p_gseq, trace.loads);
        }
        Command::Bounds { instance, trace, margin, out } => {
            let inst = read_json::<InstanceFile>(&instance)?.to_instance()?;
            let tf: TraceFile = read_json(&trace)?;
            let penalties = to_models(&tf.penalties)?;
            let eval = evaluate_trace(&inst, &penalties, &tf.allocations()?, 1e-12)?;
            let opt = offline_fw(&inst, tf.k)?;
            let report = bound_report(&inst, &penalties, tf.k, Some((eval.alg, opt.value)))?;
            let satisfied = report.as_ref().and_then(|r| r.satisfied(margin));
            let file = ReportFile {
                evaluation: EvaluationFile::from(&eval),
                opt_fw: opt.value,
                uppers: penalties.iter().map(|p| p.upper()).collect(),
                lowers: penalties.iter().map(|p| p.lower()).collect(),
                bound: report.as_ref().map(BoundFile::from),
                margin,
                satisfied,
                feasible: eval.feasible(),
            };
            write_json(&out, &file)?;
            match &report {
                Some(r) => println!(
                    "ALG/OPT_fw {:.4}  theoretical {:.4}  slack {:.3e}",
                    eval.alg / opt.value,
                    r.theoretical_cr,
                    r.finite_k_slack.unwrap_or(0.0)
                ),
                None => println!("no packing rows: bound skipped"),
            }
            if !eval.feasible() {
                return Err(Failure::Assertion(format!(
                    "infeasible trace (rows {:?}, steps {:?})",
                    eval.overloaded_rows, eval.infeasible_steps
                )));
            }
            if satisfied == Some(false) {
                return Err(Failure::Assertion("empirical ratio below the theoretical bound".into()));
            }
        }
        Command::ReproduceTable1 { n, m, seeds, k, ratio_source, out } => {
            let result = reproduce_table1(n, m, seeds, k, ratio_source)?;
            write_table(&out, &result)?;
            println!("n={n} m={m} K={k} seeds={seeds}");
            println!("  competitive ratio {:.2}% ± {:.2}", 100.0 * result.mean_cr, 100.0 * result.std_cr);
            for (i, (u, s)) in result.mean_usage.iter().zip(&result.std_usage).enumerate() {
                println!("  budget usage row {} {:.2}% ± {:.2}", i + 1, 100.0 * u, 100.0 * s);
            }
            if let Some(r) = result.records.iter().find(|r| !r.feasible) {
                return Err(Failure::Assertion(format!("seed {} ended infeasible", r.seed)));
            }
        }
        Command::Verify { family, trials, k, seed, margin, out } => {
            let report = verify_bounds(family, trials, k, seed, margin)?;
            for r in &report.records {
                let (th, emp) = r
                    .bound
                    .as_ref()
                    .map_or((f64::NAN, f64::NAN), |b| (b.theoretical_cr, b.empirical_cr.unwrap_or(f64::NAN)));
                let status = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip (no budget rows)",
                };
                println!(
                    "seed {:>4}  n={} m={}  empirical {:.4}  theoretical {:.4}  {}",
                    r.spec.seed, r.spec.n, r.spec.m, emp, th, status
                );
            }
            println!(
                "{}: {} pass, {} fail, {} skipped",
                family.name(),
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::Skipped)
            );
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            if !report.all_passed() {
                return Err(Failure::Assertion(format!("{} instances below the bound", report.count(Status::Fail))));
            }
        }
    }
    Ok(())
}

fn write_table(path: &PathBuf, result: &TableResult) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["seed".to_string(), "alg".into(), "opt_fw".into(), "competitive_ratio".into()];
    header.extend((1..=result.n).map(|i| format!("budget_usage_{i}")));
    header.extend(["feasible".to_string(), "wall_ms".into()]);
    w.write_record(&header)?;
    for r in &result.records {
        let mut row =
            vec![r.seed.to_string(), r.alg.to_string(), r.opt_fw.to_string(), r.competitive_ratio.to_string()];
        row.extend(r.budget_usage.iter().map(f64::to_string));
        row.extend([r.feasible.to_string(), format!("{:.3}", r.wall_ms)]);
        w.write_record(&row)?;
    }
    for (label, cr, usage) in [("mean", result.mean_cr, &result.mean_usage), ("std", result.std_cr, &result.std_usage)]
    {
        let mut row = vec![label.to_string(), String::new(), String::new(), cr.to_string()];
        row.extend(usage.iter().map(f64::to_string));
        row.extend([String::new(), String::new()]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
