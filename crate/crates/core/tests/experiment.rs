use std::fs;

use socialdht::engine::{GossipConfig, Scheme};
use socialdht::experiment::{
    run_experiment, run_ordering_comparison, run_q4_relabel, DatasetSource, ExperimentSpec, RelabelSpec,
};
use socialdht::graph::StrengthMode;

fn spec(dir: &std::path::Path, label: &str) -> ExperimentSpec {
    ExperimentSpec {
        dataset: DatasetSource::SymphonyFingers { n: 400 },
        label: label.into(),
        gossip: GossipConfig {
            iterations: 12,
            metrics_every: 4,
            ..GossipConfig::default()
        },
        seeds: vec![2, 3],
        output_dir: dir.to_path_buf(),
        ..ExperimentSpec::default()
    }
}

#[test]
fn replicates_write_csv_checkpoint_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiment::<f64>(&spec(dir.path(), "sy")).unwrap();
    assert_eq!(summary.replicates.len(), 2);
    assert_eq!(summary.files.len(), 2 * 2 + 2);
    for f in &summary.files {
        assert!(f.exists(), "{}", f.display());
    }
    let csv = fs::read_to_string(dir.path().join("sy_seed2.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 1 + 13);
    // metrics on iterations 0, 4, 8, 12 only
    for (i, row) in rows[1..].iter().enumerate() {
        let latency = row.split(',').nth(1).unwrap();
        assert_eq!(latency.is_empty(), i % 4 != 0, "row {i}: {row}");
    }
    let agg = fs::read_to_string(dir.path().join("sy_aggregate.csv")).unwrap();
    assert!(agg.starts_with("iteration,avg_latency_mean,avg_latency_std"));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("sy_summary.json")).unwrap()).unwrap();
    assert_eq!(json["aggregate"]["latency_gain"]["n"], 2);
}

#[test]
fn identical_specs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut sa = spec(a.path(), "d");
    let mut sb = spec(b.path(), "d");
    sa.gossip.scheme = Scheme::Smart;
    sb.gossip.scheme = Scheme::Smart;
    run_experiment::<f64>(&sa).unwrap();
    run_experiment::<f64>(&sb).unwrap();
    for f in ["d_seed2.csv", "d_seed3.csv", "d_seed2_final.overlay", "d_aggregate.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn single_precision_runs() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiment::<f32>(&spec(dir.path(), "f")).unwrap();
    assert!(summary.replicates.iter().all(|r| r.baseline.avg_friend_latency.is_some()));
}

#[test]
fn orderings_share_the_initial_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let runs = run_ordering_comparison::<f64>(&spec(dir.path(), "ord")).unwrap();
    let labels: Vec<&str> = runs.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["ord_descending", "ord_random", "ord_ascending"]);
    let first_row = |label: &str| {
        let csv = fs::read_to_string(dir.path().join(format!("{label}_seed2.csv"))).unwrap();
        csv.lines().nth(1).unwrap().to_string()
    };
    assert_eq!(first_row("ord_descending"), first_row("ord_ascending"));
}

#[test]
fn invalid_runs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(dir.path(), "bad");
    s.gossip.strength_mode = StrengthMode::IdDistance;
    assert!(run_experiment::<f64>(&s).is_err());
    let mut s = spec(dir.path(), "bad");
    s.seeds.clear();
    assert!(run_experiment::<f64>(&s).is_err());
    let mut s = spec(dir.path(), "bad");
    s.dataset = DatasetSource::EdgeList {
        path: dir.path().join("missing.txt"),
        directed: false,
    };
    assert!(run_experiment::<f64>(&s).is_err());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn relabel_reports_ideal_latency() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = RelabelSpec {
        n: 300,
        seeds: vec![1],
        output_dir: dir.path().to_path_buf(),
        ..RelabelSpec::default()
    };
    spec.gossip.iterations = 10;
    spec.gossip.metrics_every = 10;
    let s = run_q4_relabel::<f64>(&spec).unwrap();
    assert_eq!(s.aggregate["ideal_latency"].mean, 1.0);
    assert!(s.replicates[0].latency_gain.unwrap() > 0.0);
    spec.n = 50;
    assert!(run_q4_relabel::<f64>(&spec).is_err());
}
