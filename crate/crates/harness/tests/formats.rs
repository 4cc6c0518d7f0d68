use std::path::PathBuf;
use std::process::Command;

use drsub_core::engine::{evaluate_trace, run_online, EngineConfig};
use drsub_core::penalty::compute_ul;
use drsub_core::DrObjective;
use drsub_harness::experiment::{auto_penalties, reproduce_table1, verify_bounds, RatioSource, Status};
use drsub_harness::generate::{generate, Family, GeneratorSpec, KnapsackValue};
use drsub_harness::schema::{read_json, to_models, write_json, InstanceFile, ObjectiveSpec, TraceFile};

fn all_specs() -> Vec<GeneratorSpec> {
    vec![
        GeneratorSpec::new(Family::QuadraticSec5, 2, 6, 1),
        GeneratorSpec::new(Family::Adwords, 3, 5, 2),
        GeneratorSpec::new(Family::OnlineLp, 2, 7, 3),
        GeneratorSpec::new(Family::KnapsackSingle, 1, 6, 4),
        GeneratorSpec::new(Family::KnapsackSingle, 1, 5, 4).with_knapsack_value(KnapsackValue::Multilinear),
        GeneratorSpec::new(Family::WelfareSimplex, 2, 4, 5),
        GeneratorSpec::new(Family::Gap, 2, 4, 6),
    ]
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("drsub-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn instance_round_trip_is_lossless() {
    for spec in all_specs() {
        let inst = generate(&spec).unwrap();
        let text = serde_json::to_string(&InstanceFile::from_instance(&inst, Some(spec.clone()))).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_instance().unwrap(), inst, "{:?}", spec.family);
        assert_eq!(back.generator, Some(spec));
    }
}

#[test]
fn trace_round_trip_reproduces_values() {
    for spec in all_specs() {
        let inst = generate(&spec).unwrap();
        let p = auto_penalties(&inst, 0.0).unwrap();
        let trace = run_online(&inst, &p, &EngineConfig::new(30)).unwrap();
        let path = scratch(&format!("{}.json", spec.family.name()));
        write_json(&path, &TraceFile::from_trace(&trace, &p)).unwrap();
        let back: TraceFile = read_json(&path).unwrap();
        let eval =
            evaluate_trace(&inst, &to_models(&back.penalties).unwrap(), &back.allocations().unwrap(), 1e-12).unwrap();
        assert!((eval.alg - trace.alg).abs() <= 1e-12 * trace.alg.abs().max(1.0));
        assert!((eval.p_gseq - trace.p_gseq).abs() <= 1e-12 * trace.p_gseq.abs().max(1.0));
        assert_eq!(back.dual().unwrap(), trace.dual);
    }
}

#[test]
fn missing_table_entry_is_rejected() {
    let inst = generate(&GeneratorSpec::new(Family::Gap, 2, 3, 0)).unwrap();
    let mut file = InstanceFile::from_instance(&inst, None);
    if let ObjectiveSpec::Multilinear { table, .. } = &mut file.objectives[0] {
        table.remove(&5);
    }
    assert!(file.to_instance().is_err());
}

#[test]
fn generation_is_deterministic() {
    for spec in all_specs() {
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }
    let a = generate(&GeneratorSpec::new(Family::QuadraticSec5, 1, 5, 1)).unwrap();
    let b = generate(&GeneratorSpec::new(Family::QuadraticSec5, 1, 5, 2)).unwrap();
    assert_ne!(a, b);
}

#[test]
fn quadratic_family_shapes() {
    let inst = generate(&GeneratorSpec::new(Family::QuadraticSec5, 1, 100, 0)).unwrap();
    assert_eq!((inst.rows(), inst.steps()), (1, 100));
    let DrObjective::Quadratic(q) = &inst.objectives()[0] else { panic!() };
    assert!(q.hessian().as_slice().iter().all(|v| (-100.0..=0.0).contains(v)));
    for t in 0..100 {
        let col: f64 = q.hessian().column(t).iter().sum();
        assert!((q.linear()[t] + col).abs() < 1e-9);
    }
    assert!(inst.costs().as_slice().iter().all(|c| (0.0..=1.0).contains(c)));
}

#[test]
fn adwords_ratio_bounds_are_one() {
    let inst = generate(&GeneratorSpec::new(Family::Adwords, 4, 10, 9)).unwrap();
    for i in 0..4 {
        let ul = compute_ul(&inst.objectives()[i], inst.row_costs(i), &inst.row_reach(i)).unwrap();
        assert_eq!((ul.upper, ul.lower_exact), (1.0, 1.0));
    }
}

#[test]
fn welfare_is_skipped() {
    let report = verify_bounds(Family::WelfareSimplex, 3, 50, 0, 0.05).unwrap();
    assert_eq!(report.count(Status::Skipped), 3);
    assert!(report.records.iter().all(|r| r.feasible));
}

#[test]
fn experiments_are_deterministic() {
    let strip = |mut r: drsub_harness::experiment::TableResult| {
        r.records.iter_mut().for_each(|s| s.wall_ms = 0.0);
        r
    };
    let a = strip(reproduce_table1(2, 15, 3, 20, RatioSource::Trajectory).unwrap());
    let b = strip(reproduce_table1(2, 15, 3, 20, RatioSource::Trajectory).unwrap());
    assert_eq!(a, b);
    assert!(a.records.iter().all(|r| r.feasible && r.competitive_ratio > 0.0));
}

fn drsub(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_drsub")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn cli_exit_codes() {
    let inst = scratch("cli-inst.json");
    let trace = scratch("cli-trace.json");
    let report = scratch("cli-report.json");
    let table = scratch("cli-table.csv");
    let (i, t, r) = (inst.to_str().unwrap(), trace.to_str().unwrap(), report.to_str().unwrap());
    assert_eq!(drsub(&["generate", "--family", "online_lp", "--n", "2", "--m", "6", "--seed", "1", "--out", i]), 0);
    assert_eq!(drsub(&["run", "--instance", i, "--K", "100", "--out", t]), 0);
    assert_eq!(drsub(&["bounds", "--instance", i, "--trace", t, "--out", r]), 0);
    assert_eq!(
        drsub(&[
            "reproduce-table1",
            "--n",
            "1",
            "--m",
            "10",
            "--seeds",
            "2",
            "--K",
            "10",
            "--out",
            table.to_str().unwrap()
        ]),
        0
    );
    let csv = std::fs::read_to_string(&table).unwrap();
    assert!(csv.starts_with("seed,alg,opt_fw,competitive_ratio,budget_usage_1,"));
    assert_eq!(csv.lines().count(), 5);

    let mut tampered: TraceFile = read_json(&trace).unwrap();
    tampered.allocations.iter_mut().for_each(|x| *x = 1.0);
    write_json(&trace, &tampered).unwrap();
    assert_eq!(drsub(&["bounds", "--instance", i, "--trace", t, "--out", r]), 1);

    assert_eq!(drsub(&["run", "--instance", "/nonexistent/instance.json", "--out", t]), 2);
    assert_eq!(drsub(&["generate", "--family", "gap", "--n", "2", "--m", "30", "--out", i]), 2);
    assert_eq!(drsub(&["run", "--instance", i, "--K", "0", "--out", t]), 2);
}
