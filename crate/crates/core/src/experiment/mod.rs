//! Seeded experiment runs: replicated embeddings of a dataset, the execution-ordering
//! comparison, and relabeling of a Symphony overlay's own finger graph.
//!
//! Each replicate writes `<label>_seed<seed>.csv` (one row per iteration, iteration 0 being
//! the random initial placement) and `<label>_seed<seed>_final.overlay`. Every run also
//! writes `<label>_summary.json`; runs with more than one replicate add
//! `<label>_aggregate.csv` holding the per-iteration mean and standard deviation.

mod config;
mod stats;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{parse_keyword, KeywordEnum};
pub use stats::MeanStd;

use crate::engine::{EngineState, ExecutionOrder, GossipConfig};
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, SocialGraph, StrengthMode, StrengthProvider};
use crate::metrics::{write_csv_header, write_csv_row, IterationReport, SnapshotMetrics};
use crate::overlay::{build_ring, default_k, write_checkpoint, IdMode, Ring};
use crate::scalar::Scalar;

/// Per-iteration swap fraction below which a run counts as settled.
pub const QUIET_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DatasetSource {
    EdgeList { path: PathBuf, directed: bool },
    /// Undirected finger graph of a fresh Symphony ring with `n` slots.
    SymphonyFingers { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSource,
    pub label: String,
    pub gossip: GossipConfig,
    /// Long links per slot; `None` means `⌈log₂ n⌉`.
    pub k: Option<usize>,
    pub id_mode: IdMode,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            dataset: DatasetSource::EdgeList {
                path: PathBuf::from("data/facebook_combined.txt"),
                directed: false,
            },
            label: "run".into(),
            gossip: GossipConfig::default(),
            k: None,
            id_mode: IdMode::UniformRandom,
            seeds: (0..5).collect(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.gossip.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one replicate seed is required".into()));
        }
        if self.label.is_empty() || self.label.contains(['/', '\\']) {
            return Err(Error::Config(format!("label {:?} is not a usable file prefix", self.label)));
        }
        Ok(())
    }

    pub fn load_graph(&self) -> Result<SocialGraph> {
        match &self.dataset {
            DatasetSource::EdgeList { path, directed } => Ok(load_edge_list(path, *directed)?.0),
            DatasetSource::SymphonyFingers { n } => {
                let ring: Ring<f64> = build_ring(*n, self.k.unwrap_or_else(|| default_k(*n)), 0, IdMode::UniformRandom)?;
                Ok(ring.finger_graph())
            }
        }
    }

    pub fn k_for(&self, n: usize) -> usize {
        self.k.unwrap_or_else(|| default_k(n))
    }
}

/// Headline numbers of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateSummary {
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub k: usize,
    pub iterations: usize,
    pub baseline: SnapshotMetrics,
    #[serde(rename = "final")]
    pub final_metrics: SnapshotMetrics,
    /// `(baseline - final) / baseline` of the mean friend latency.
    pub latency_gain: Option<f64>,
    pub cumulative_swaps: u64,
    pub cumulative_attempts: u64,
    pub cumulative_migration_fraction: Option<f64>,
    pub movers_fraction: f64,
    pub final_per_iter_fraction: Option<f64>,
    /// First iteration whose swap fraction fell below [`QUIET_FRACTION`].
    pub first_quiet_iteration: Option<usize>,
}

/// A replicate's full log and its summary.
#[derive(Debug, Clone)]
pub struct ReplicateRun {
    pub summary: ReplicateSummary,
    /// Iteration 0 (initial placement) followed by one row per iteration.
    pub reports: Vec<IterationReport>,
    pub final_checkpoint: Vec<u8>,
}

impl ReplicateRun {
    pub fn csv_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        write_csv_header(&mut buf).expect("writing to memory");
        for r in &self.reports {
            write_csv_row(&mut buf, r).expect("writing to memory");
        }
        buf
    }
}

/// Runs the engine to completion and summarises it.
pub fn finish_replicate<T: Scalar>(mut engine: EngineState<T>) -> ReplicateRun {
    let baseline_report = engine.baseline_report();
    let mut reports = vec![baseline_report];
    reports.extend(engine.run());
    summarise(engine, reports)
}

fn summarise<T: Scalar>(engine: EngineState<T>, reports: Vec<IterationReport>) -> ReplicateRun {
    let baseline = reports[0].metrics.clone().expect("baseline evaluates metrics");
    let last = reports.last().expect("at least the baseline row");
    let final_metrics = reports
        .iter()
        .rev()
        .find_map(|r| r.metrics.clone())
        .expect("last iteration evaluates metrics");
    let latency_gain = match (baseline.avg_friend_latency, final_metrics.avg_friend_latency) {
        (Some(b), Some(f)) if b > 0.0 => Some((b - f) / b),
        _ => None,
    };
    let first_quiet_iteration = reports[1..]
        .iter()
        .find(|r| r.per_iteration_fraction().is_some_and(|f| f < QUIET_FRACTION))
        .map(|r| r.iteration);
    let mut final_checkpoint = Vec::new();
    write_checkpoint(engine.ring(), engine.placement(), &mut final_checkpoint).expect("writing to memory");
    let summary = ReplicateSummary {
        seed: engine.config().seed,
        nodes: engine.graph().node_count(),
        edges: engine.graph().edge_count(),
        k: engine.ring().k(),
        iterations: last.iteration,
        baseline,
        final_metrics,
        latency_gain,
        cumulative_swaps: last.cumulative_swaps,
        cumulative_attempts: last.cumulative_attempts,
        cumulative_migration_fraction: last.cumulative_migration_fraction(),
        movers_fraction: last.movers_fraction,
        final_per_iter_fraction: last.per_iteration_fraction(),
        first_quiet_iteration,
    };
    ReplicateRun {
        summary,
        reports,
        final_checkpoint,
    }
}

/// Initializes and runs one replicate of `spec` on an already loaded graph.
pub fn run_replicate<T: Scalar>(
    graph: Arc<SocialGraph>,
    spec: &ExperimentSpec,
    seed: u64,
    strengths: &StrengthProvider<T>,
) -> Result<ReplicateRun> {
    let config = GossipConfig {
        seed,
        ..spec.gossip.clone()
    };
    let k = spec.k_for(graph.node_count());
    let engine = EngineState::initialize(graph, k, spec.id_mode, config, strengths)?;
    Ok(finish_replicate(engine))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub label: String,
    pub spec: ExperimentSpec,
    pub replicates: Vec<ReplicateSummary>,
    /// Mean and standard deviation of the headline numbers across replicates.
    pub aggregate: BTreeMap<String, MeanStd>,
    pub files: Vec<PathBuf>,
}

/// Output files written so far; removed again if the run fails.
struct OutputGuard {
    files: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    fn new() -> Self {
        OutputGuard {
            files: Vec::new(),
            committed: false,
        }
    }

    fn write(&mut self, path: PathBuf, bytes: &[u8]) -> Result<()> {
        self.files.push(path.clone());
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(&path, e))
    }

    fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.files)
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.committed {
            for f in &self.files {
                let _ = fs::remove_file(f);
            }
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs every replicate of `spec` and writes the per-replicate CSVs, final overlay
/// checkpoints, the aggregate CSV and the JSON summary.
pub fn run_experiment<T: Scalar>(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let graph = Arc::new(spec.load_graph()?);
    if spec.gossip.strength_mode == StrengthMode::IdDistance {
        return Err(Error::Config(
            "id-distance strength needs reference identifiers; use the relabel experiment".into(),
        ));
    }
    run_experiment_on::<T>(spec, graph)
}

/// [`run_experiment`] on a graph that is already in memory.
pub fn run_experiment_on<T: Scalar>(spec: &ExperimentSpec, graph: Arc<SocialGraph>) -> Result<ExperimentSummary> {
    spec.validate()?;
    ensure_dir(&spec.output_dir)?;
    log::info!(
        "{}: {} nodes, {} edges, k = {}, {} replicate(s)",
        spec.label,
        graph.node_count(),
        graph.edge_count(),
        spec.k_for(graph.node_count()),
        spec.seeds.len()
    );
    let runs: Vec<ReplicateRun> = spec
        .seeds
        .par_iter()
        .map(|&seed| run_replicate::<T>(graph.clone(), spec, seed, &StrengthProvider::CommonNeighbors))
        .collect::<Result<_>>()?;
    write_outputs(spec, &runs, |s| s)
}

fn write_outputs<F>(spec: &ExperimentSpec, runs: &[ReplicateRun], extra: F) -> Result<ExperimentSummary>
where
    F: FnOnce(ExperimentSummary) -> ExperimentSummary,
{
    let mut guard = OutputGuard::new();
    for run in runs {
        let seed = run.summary.seed;
        guard.write(spec.output_dir.join(format!("{}_seed{seed}.csv", spec.label)), &run.csv_bytes())?;
        guard.write(
            spec.output_dir.join(format!("{}_seed{seed}_final.overlay", spec.label)),
            &run.final_checkpoint,
        )?;
        log::info!(
            "{} seed {seed}: latency {:.3} -> {:.3} (gain {:.1}%), migration {:.4}",
            spec.label,
            run.summary.baseline.avg_friend_latency.unwrap_or(f64::NAN),
            run.summary.final_metrics.avg_friend_latency.unwrap_or(f64::NAN),
            100.0 * run.summary.latency_gain.unwrap_or(f64::NAN),
            run.summary.cumulative_migration_fraction.unwrap_or(f64::NAN),
        );
    }
    if runs.len() > 1 {
        guard.write(
            spec.output_dir.join(format!("{}_aggregate.csv", spec.label)),
            &stats::aggregate_csv(runs),
        )?;
    }
    let replicates: Vec<ReplicateSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let mut summary = extra(ExperimentSummary {
        label: spec.label.clone(),
        spec: spec.clone(),
        aggregate: stats::aggregate_summaries(&replicates),
        replicates,
        files: Vec::new(),
    });
    let summary_path = spec.output_dir.join(format!("{}_summary.json", spec.label));
    summary.files = guard.files.clone();
    summary.files.push(summary_path.clone());
    let json = serde_json::to_vec_pretty(&summary)?;
    guard.write(summary_path, &json)?;
    guard.commit();
    Ok(summary)
}

/// Runs `spec` once per execution ordering from identical initial overlays. Labels get a
/// `_descending`, `_random` or `_ascending` suffix.
pub fn run_ordering_comparison<T: Scalar>(spec: &ExperimentSpec) -> Result<Vec<ExperimentSummary>> {
    spec.validate()?;
    let graph = Arc::new(spec.load_graph()?);
    [
        (ExecutionOrder::DescendingDegree, "descending"),
        (ExecutionOrder::RandomOrder, "random"),
        (ExecutionOrder::AscendingDegree, "ascending"),
    ]
    .into_iter()
    .map(|(ordering, suffix)| {
        let mut variant = spec.clone();
        variant.gossip.ordering = ordering;
        variant.label = format!("{}_{suffix}", spec.label);
        run_experiment_on::<T>(&variant, graph.clone())
    })
    .collect()
}

/// Overlay self-relabeling: a Symphony ring's finger graph is treated as the social graph
/// and re-embedded onto a fresh ring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelabelSpec {
    pub n: usize,
    pub k: Option<usize>,
    pub seeds: Vec<u64>,
    pub strength_mode: StrengthMode,
    pub gossip: GossipConfig,
    pub output_dir: PathBuf,
    pub label: String,
}

impl Default for RelabelSpec {
    fn default() -> Self {
        RelabelSpec {
            n: 10_000,
            k: None,
            seeds: (0..5).collect(),
            strength_mode: StrengthMode::IdDistance,
            gossip: GossipConfig::default(),
            output_dir: PathBuf::from("out"),
            label: "relabel".into(),
        }
    }
}

/// Reference latency of the step-1 graph: each of its edges is one overlay hop there.
pub const RELABEL_IDEAL_LATENCY: f64 = 1.0;

const STEP1_STREAM: u64 = 0x51;

/// Step 1 of the relabeling scenario for `seed`: the original ring and its finger graph.
pub fn relabel_step1<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<(Ring<T>, SocialGraph)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STEP1_STREAM);
    let ring = build_ring::<T>(n, k, rng.random(), IdMode::UniformRandom)?;
    let graph = ring.finger_graph();
    Ok((ring, graph))
}

/// One replicate of the relabeling scenario.
pub fn run_relabel_replicate<T: Scalar>(spec: &RelabelSpec, seed: u64) -> Result<ReplicateRun> {
    let k = spec.k.unwrap_or_else(|| default_k(spec.n));
    let (step1, graph) = relabel_step1::<T>(spec.n, k, seed)?;
    let strengths = match spec.strength_mode {
        StrengthMode::CommonNeighbors => StrengthProvider::CommonNeighbors,
        StrengthMode::IdDistance => StrengthProvider::IdDistance {
            reference: step1.ids().to_vec(),
        },
    };
    let config = GossipConfig {
        seed,
        strength_mode: spec.strength_mode,
        ..spec.gossip.clone()
    };
    let engine = EngineState::initialize(Arc::new(graph), k, IdMode::UniformRandom, config, &strengths)?;
    Ok(finish_replicate(engine))
}

pub fn run_q4_relabel<T: Scalar>(spec: &RelabelSpec) -> Result<ExperimentSummary> {
    if spec.n < 100 {
        return Err(Error::Config(format!("relabel needs n >= 100, got {}", spec.n)));
    }
    let as_experiment = ExperimentSpec {
        dataset: DatasetSource::SymphonyFingers { n: spec.n },
        label: spec.label.clone(),
        gossip: GossipConfig {
            strength_mode: spec.strength_mode,
            ..spec.gossip.clone()
        },
        k: spec.k,
        id_mode: IdMode::UniformRandom,
        seeds: spec.seeds.clone(),
        output_dir: spec.output_dir.clone(),
    };
    as_experiment.validate()?;
    ensure_dir(&spec.output_dir)?;
    let runs: Vec<ReplicateRun> = spec
        .seeds
        .par_iter()
        .map(|&seed| run_relabel_replicate::<T>(spec, seed))
        .collect::<Result<_>>()?;
    write_outputs(&as_experiment, &runs, |mut s| {
        s.aggregate.insert(
            "ideal_latency".into(),
            MeanStd {
                mean: RELABEL_IDEAL_LATENCY,
                std: 0.0,
                n: runs.len(),
            },
        );
        s
    })
}
