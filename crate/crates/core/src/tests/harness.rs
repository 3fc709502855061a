use crate::harness::{
    emit_plot, parse_config, render_csv, run_experiment, run_single, sweep_bound_config, write_csv,
    AlgorithmKind, ExperimentConfig, CSV_HEADER,
};

fn small(extra: &[(&str, &str)]) -> ExperimentConfig {
    let mut pairs = vec![
        ("scenario.m", "8"),
        ("scenario.q", "3"),
        ("jio.rank", "2"),
        ("run.snapshots", "200"),
        ("run.runs", "6"),
        ("run.seed", "99"),
    ];
    pairs.extend_from_slice(extra);
    let overrides: Vec<(String, String)> = pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    parse_config("", &overrides).unwrap()
}

#[test]
fn every_algorithm_sees_the_same_snapshots() {
    let cfg = small(&[]);
    for k in 0..3 {
        let run = run_single(&cfg, k).unwrap();
        let first = run.traces[0].stream_checksum;
        assert!(run.traces.iter().all(|t| t.stream_checksum == first));
    }
    let a = run_single(&cfg, 0).unwrap().traces[0].stream_checksum;
    let b = run_single(&cfg, 1).unwrap().traces[0].stream_checksum;
    assert_ne!(a, b, "runs must draw independent streams");
}

#[test]
fn cumulative_fraction_is_running_mean_of_flags() {
    let cfg = small(&[]);
    let run = run_single(&cfg, 2).unwrap();
    for trace in &run.traces {
        let frac = trace.cumulative_update_fraction();
        let mut count = 0usize;
        for (i, (flag, f)) in trace.updated.iter().zip(&frac).enumerate() {
            count += *flag as usize;
            assert_eq!(*f, count as f64 / (i + 1) as f64);
        }
    }
}

#[test]
fn no_adaptive_filter_beats_the_oracle() {
    let cfg = small(&[]);
    let specs = cfg.algorithm_specs();
    let oracle = specs
        .iter()
        .position(|s| s.kind == AlgorithmKind::Oracle)
        .unwrap();
    for k in 0..4 {
        let run = run_single(&cfg, k).unwrap();
        let best = &run.traces[oracle].sinr;
        for trace in &run.traces {
            for (s, o) in trace.sinr.iter().zip(best) {
                assert!(*s <= o * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn same_seed_same_bytes_any_thread_count() {
    let one = run_experiment(&small(&[("run.threads", "1")])).unwrap();
    let many = run_experiment(&small(&[("run.threads", "4")])).unwrap();
    assert_eq!(
        render_csv(&one.curves).unwrap(),
        render_csv(&many.curves).unwrap()
    );
    let other = run_experiment(&small(&[("run.seed", "100")])).unwrap();
    assert_ne!(
        render_csv(&one.curves).unwrap(),
        render_csv(&other.curves).unwrap()
    );
}

#[test]
fn diverging_baseline_is_scored_at_the_floor() {
    let cfg = small(&[("sg.mu", "10"), ("run.algorithms", "fr-sg,oracle")]);
    let result = run_experiment(&cfg).unwrap();
    let fr = result.curve("fr-sg").unwrap();
    assert!(fr.mean_sinr_db.iter().all(|v| v.is_finite()));
    assert!(fr.mean_sinr_db.last().unwrap() < &-20.0);
}

#[test]
fn bound_sweep_labels_and_ordering() {
    let base = small(&[("run.algorithms", "fr-sm-sg")]);
    let cfg = sweep_bound_config(&base, &[0.7, 1.5]);
    let result = run_experiment(&cfg).unwrap();
    let labels: Vec<&str> = result.curves.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(
        labels,
        [
            "fr-sm-sg[delta=0.7]",
            "fr-sm-sg[delta=1.5]",
            "fr-sm-sg[pdb]"
        ]
    );
}

#[test]
fn golden_csv_single_run_three_snapshots() {
    let cfg = small(&[("run.runs", "1"), ("run.snapshots", "3"), ("run.seed", "7")]);
    let result = run_experiment(&cfg).unwrap();
    let text = render_csv(&result.curves).unwrap();
    let expected = include_str!("golden/k1_n3.csv");
    assert_eq!(text, expected);
    assert!(text.starts_with(CSV_HEADER));
}

#[test]
fn files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_experiment(&small(&[("run.runs", "2"), ("run.snapshots", "20")])).unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    write_csv(&result.curves, &csv).unwrap();
    emit_plot(&result.curves, &svg).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 20 * result.curves.len());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
    let missing = dir.path().join("nope").join("out.csv");
    assert!(write_csv(&result.curves, &missing).is_err());
}
