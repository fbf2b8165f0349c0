mod common;

use std::path::Path;

use acs_supply::bench::{
    build_report, checkpoint_iterations, emit_report, rebuild_report, run_matrix, run_matrix_on, run_timing,
    ArchSpec, BenchError, ExperimentConfig,
};
use acs_supply::instance::write_instance;
use acs_supply::Architecture;

use common::*;

fn pa() -> ArchSpec {
    ArchSpec::new(Architecture::Pa, 1)
}

fn dataset(dir: &Path) -> ExperimentConfig {
    write_instance(&small(12), &dir.join("data")).unwrap();
    ExperimentConfig {
        data_dir: dir.join("data"),
        output_dir: dir.join("out"),
        architectures: vec![pa(), ArchSpec::new(Architecture::Iac, 1), ArchSpec::new(Architecture::Pa, 5)],
        instance_counts: vec![1, 2, 4],
        repeats: 3,
        solution_budget: 200,
        workers: Some(1),
        ..ExperimentConfig::default()
    }
}

#[test]
fn single_cell_records_every_stride() {
    let instance = small(3);
    let config = ExperimentConfig {
        architectures: vec![pa()],
        instance_counts: vec![1],
        repeats: 1,
        solution_budget: 100,
        workers: Some(1),
        ..ExperimentConfig::default()
    };
    let traces = run_matrix_on(&config, &instance).unwrap();
    assert_eq!(traces.len(), 1);
    let its: Vec<usize> = traces[0].points.iter().map(|p| p.0).collect();
    assert_eq!(its, (1..=20).map(|i| i * 5).collect::<Vec<_>>());
}

#[test]
fn matrix_columns_never_get_worse() {
    let instance = small(4);
    let config = ExperimentConfig {
        architectures: vec![pa()],
        instance_counts: vec![1, 4],
        repeats: 4,
        solution_budget: 400,
        workers: Some(1),
        best_known_cost: 1.0,
        ..ExperimentConfig::default()
    };
    let report = build_report(&config, run_matrix_on(&config, &instance).unwrap(), Vec::new());
    for n in [1, 4] {
        let col = report.matrix.column(pa(), n);
        assert!(!col.is_empty());
        assert!(col.windows(2).all(|w| w[1].1 >= w[0].1));
    }
    // Every run reaches a zero threshold at its first recorded point.
    let table = checkpoint_iterations(&report.traces, &[0.0], 1.0, 0.8);
    assert_eq!(table.get(pa(), 0.0, 1).unwrap().mean_iterations, Some(5.0));
}

#[test]
fn reruns_write_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = dataset(dir.path());
    config.jobs = 2;
    let first = run_matrix(&config).unwrap();
    let a = build_report(&config, first, Vec::new());
    emit_report(&a, &dir.path().join("a")).unwrap();
    let b = build_report(&config, run_matrix(&config).unwrap(), Vec::new());
    emit_report(&b, &dir.path().join("b")).unwrap();
    for f in ["convergence_matrix.csv", "checkpoint_table.csv", "timing.csv", "traces.csv"] {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn empty_architecture_list_gives_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        architectures: Vec::new(),
        ..ExperimentConfig::default()
    };
    emit_report(&build_report(&config, Vec::new(), Vec::new()), dir.path()).unwrap();
    for f in ["convergence_matrix.csv", "checkpoint_table.csv", "timing.csv"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(text.lines().count(), 1, "{f}");
    }
    let header = std::fs::read_to_string(dir.path().join("convergence_matrix.csv")).unwrap();
    assert_eq!(
        header.trim(),
        "architecture,iteration,1,2,4,8,16,32,64,128,256,512,1024"
    );
}

#[test]
fn changing_best_known_rescales_proximity() {
    let instance = small(9);
    let config = ExperimentConfig {
        architectures: vec![pa()],
        instance_counts: vec![2],
        repeats: 2,
        solution_budget: 100,
        workers: Some(1),
        best_known_cost: 100.0,
        ..ExperimentConfig::default()
    };
    let traces = run_matrix_on(&config, &instance).unwrap();
    let a = build_report(&config, traces.clone(), Vec::new());
    let b = build_report(&ExperimentConfig { best_known_cost: 50.0, ..config }, traces, Vec::new());
    for (it, p) in a.matrix.column(pa(), 2) {
        let q = b.matrix.get(pa(), 2, it).unwrap();
        assert!((q - p / 2.0).abs() < 1e-9 * p);
    }
}

#[test]
fn report_rebuilds_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    let config = dataset(dir.path());
    let report = build_report(&config, run_matrix(&config).unwrap(), Vec::new());
    emit_report(&report, &config.output_dir).unwrap();
    let again = rebuild_report(&config, &config.output_dir.join("traces.csv")).unwrap();
    assert_eq!(again.matrix, report.matrix);
    assert_eq!(again.checkpoints, report.checkpoints);
    assert_eq!(again.traces, report.traces);
}

#[test]
fn timing_with_one_iteration() {
    let instance = small(10);
    let config = ExperimentConfig {
        architectures: vec![pa(), ArchSpec::new(Architecture::Pawv, 1)],
        instance_counts: vec![1, 8],
        timing_iteration_cap: 1,
        timing_repeats: 2,
        workers: Some(1),
        ..ExperimentConfig::default()
    };
    let records = run_timing(&config, &instance).unwrap();
    assert_eq!(records.len(), 4);
    for r in records {
        assert_eq!(r.runs.len(), 2);
        assert!(r.runs.iter().all(|&(it, _)| it == 1));
        assert!(r.mean_seconds_per_iteration > 0.0);
    }
}

#[test]
fn failed_cell_keeps_finished_traces() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = dataset(dir.path());
    config.architectures = vec![pa()];
    config.instance_counts = vec![1, 70_000];
    config.repeats = 1;
    config.solution_budget = 100_000;
    match run_matrix(&config) {
        Err(BenchError::RunFailed { completed, .. }) => assert_eq!(completed.len(), 1),
        other => panic!("expected a failed cell, got {other:?}"),
    }
    let flushed = std::fs::read_to_string(config.output_dir.join("traces.csv")).unwrap();
    assert!(flushed.lines().count() > 1);
}

#[test]
fn missing_dataset_is_a_data_error() {
    let config = ExperimentConfig {
        data_dir: "/nonexistent/acs-data".into(),
        ..ExperimentConfig::default()
    };
    assert!(matches!(run_matrix(&config), Err(BenchError::Data(_))));
}
