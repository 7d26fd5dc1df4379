mod fetch;

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use socialdht::experiment::{
    parse_keyword, run_experiment, run_ordering_comparison, run_q4_relabel, ExperimentSpec, RelabelSpec,
};
use socialdht::graph::load_edge_list;
use socialdht::metrics::{snapshot_metrics, MetricsConfig};
use socialdht::overlay::read_checkpoint;
use socialdht::Scalar;

#[derive(Parser)]
#[command(name = "socialdht", version, about = "Socially-aware placement of users on a Symphony DHT")]
struct Cli {
    /// Float type for identifiers, strengths and costs.
    #[arg(long, value_enum, global = true, default_value_t = Precision::F64)]
    precision: Precision,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Subcommand)]
enum Command {
    /// Download SNAP datasets listed in the manifest.
    Fetch(FetchArgs),
    /// Embed a social graph and log latency, migration and reliability per iteration.
    Embed(SpecArgs),
    /// Run the same embedding under descending, random and ascending degree orderings.
    Orderings(SpecArgs),
    /// Re-embed a Symphony overlay's own finger graph onto a fresh ring.
    Relabel(RelabelArgs),
    /// Recompute snapshot metrics from an overlay checkpoint.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct FetchArgs {
    /// Dataset names; all manifest entries when omitted.
    names: Vec<String>,
    #[arg(long, default_value = "datasets/manifest.txt")]
    manifest: PathBuf,
    #[arg(long, default_value = "data")]
    dest: PathBuf,
    /// Use a local archive instead of downloading (single dataset only).
    #[arg(long)]
    from: Option<PathBuf>,
}

/// Experiment settings. A config file is applied first, then `--set` pairs, then the
/// dedicated flags.
#[derive(Args)]
struct SpecArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Edge-list path or `symphony:<n>`.
    #[arg(long)]
    dataset: Option<String>,
    /// Symmetrize a directed edge list.
    #[arg(long)]
    directed: Option<bool>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// random | direct | greedy | smart
    #[arg(long)]
    scheme: Option<String>,
    /// ring-distance | hop-count
    #[arg(long)]
    metric: Option<String>,
    /// circular | literal-abs
    #[arg(long)]
    distance: Option<String>,
    /// random | descending-degree | ascending-degree
    #[arg(long)]
    ordering: Option<String>,
    /// sweep | attempt
    #[arg(long)]
    unit: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    smart_width: Option<String>,
    #[arg(long)]
    metrics_every: Option<String>,
    #[arg(long)]
    sample_cap: Option<String>,
    #[arg(long)]
    max_hops: Option<String>,
    /// greedy | bfs
    #[arg(long)]
    hop_mode: Option<String>,
    /// Long links per slot, or `auto`.
    #[arg(long)]
    k: Option<String>,
    /// uniform | even
    #[arg(long)]
    id_mode: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    /// common-neighbors | id-distance
    #[arg(long)]
    strength: Option<String>,
}

impl SpecArgs {
    fn build(&self) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            spec.apply_config(&text).with_context(|| format!("in {}", path.display()))?;
        }
        for pair in &self.overrides {
            let Some((key, value)) = pair.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {pair:?}");
            };
            spec.set(key, value)?;
        }
        let flags: [(&str, Option<String>); 21] = [
            ("dataset", self.dataset.clone()),
            ("directed", self.directed.map(|d| d.to_string())),
            ("label", self.label.clone()),
            ("output", self.output.clone()),
            ("scheme", self.scheme.clone()),
            ("metric", self.metric.clone()),
            ("distance", self.distance.clone()),
            ("ordering", self.ordering.clone()),
            ("unit", self.unit.clone()),
            ("iterations", self.iterations.clone()),
            ("smart_width", self.smart_width.clone()),
            ("metrics_every", self.metrics_every.clone()),
            ("sample_cap", self.sample_cap.clone()),
            ("max_hops", self.max_hops.clone()),
            ("hop_mode", self.hop_mode.clone()),
            ("k", self.k.clone()),
            ("id_mode", self.id_mode.clone()),
            ("seeds", self.seeds.clone()),
            ("base_seed", self.base_seed.clone()),
            ("replicates", self.replicates.clone()),
            ("strength", self.strength.clone()),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                spec.set(key, &value)?;
            }
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct RelabelArgs {
    /// Slots in the overlay being relabeled.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    /// id-distance | common-neighbors
    #[arg(long, default_value = "id-distance")]
    strength: String,
    #[arg(long, default_value = "0,1,2,3,4")]
    seeds: String,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    #[arg(long, default_value = "direct")]
    scheme: String,
    /// ring-distance | hop-count
    #[arg(long, default_value = "ring-distance")]
    metric: String,
    /// circular | literal-abs
    #[arg(long, default_value = "circular")]
    distance: String,
    #[arg(long, default_value_t = 1)]
    metrics_every: usize,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    #[arg(long, default_value = "relabel")]
    label: String,
}

#[derive(Args)]
struct MetricsArgs {
    /// Overlay checkpoint written by `embed`.
    checkpoint: PathBuf,
    /// Edge list of the embedded social graph.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    directed: bool,
    #[arg(long, default_value_t = MetricsConfig::default().sample_cap)]
    sample_cap: usize,
    /// greedy | bfs
    #[arg(long, default_value = "greedy")]
    hop_mode: String,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.precision {
        Precision::F64 => dispatch::<f64>(cli.command),
        Precision::F32 => dispatch::<f32>(cli.command),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch<T: Scalar>(command: Command) -> Result<()> {
    match command {
        Command::Fetch(args) => cmd_fetch(args),
        Command::Embed(args) => {
            let summary = run_experiment::<T>(&args.build()?)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Orderings(args) => {
            let summaries = run_ordering_comparison::<T>(&args.build()?)?;
            println!("{}", serde_json::to_string_pretty(&summaries)?);
            Ok(())
        }
        Command::Relabel(args) => {
            let mut spec = RelabelSpec {
                n: args.n,
                k: args.k,
                strength_mode: parse_keyword("strength", &args.strength)?,
                output_dir: args.output,
                label: args.label,
                ..RelabelSpec::default()
            };
            spec.seeds = args
                .seeds
                .split(',')
                .map(|s| s.trim().parse().with_context(|| format!("bad seed {s:?}")))
                .collect::<Result<_>>()?;
            spec.gossip.iterations = args.iterations;
            spec.gossip.metrics_every = args.metrics_every;
            spec.gossip.scheme = parse_keyword("scheme", &args.scheme)?;
            spec.gossip.metric = parse_keyword("metric", &args.metric)?;
            spec.gossip.distance = parse_keyword("distance", &args.distance)?;
            let summary = run_q4_relabel::<T>(&spec)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Metrics(args) => {
            let (graph, _) = load_edge_list(&args.dataset, args.directed)?;
            let file = fs::File::open(&args.checkpoint)
                .with_context(|| format!("opening {}", args.checkpoint.display()))?;
            let (ring, placement) = read_checkpoint::<T, _>(BufReader::new(file))?;
            if ring.len() != graph.node_count() {
                bail!(
                    "checkpoint has {} slots but the graph has {} users",
                    ring.len(),
                    graph.node_count()
                );
            }
            let config = MetricsConfig {
                sample_cap: args.sample_cap,
                hop_mode: parse_keyword("hop_mode", &args.hop_mode)?,
                ..MetricsConfig::default()
            };
            let metrics = snapshot_metrics(&graph, &ring, &placement, &config);
            println!("{}", serde_json::to_string_pretty(&metrics)?);
            Ok(())
        }
    }
}

fn cmd_fetch(args: FetchArgs) -> Result<()> {
    let manifest = fetch::load_manifest(&args.manifest)?;
    let selected: Vec<_> = if args.names.is_empty() {
        manifest.iter().collect()
    } else {
        args.names
            .iter()
            .map(|n| {
                manifest
                    .iter()
                    .find(|e| &e.name == n)
                    .with_context(|| format!("{n:?} is not in {}", args.manifest.display()))
            })
            .collect::<Result<_>>()?
    };
    if args.from.is_some() && selected.len() != 1 {
        bail!("--from needs exactly one dataset name");
    }
    for entry in selected {
        let (path, digest) = fetch::fetch(entry, &args.dest, args.from.as_deref())?;
        let lines = fetch::count_data_lines(&path)?;
        println!(
            "{}\t{}\t{} data lines\tdirected={}\tsha256={}",
            entry.name,
            path.display(),
            lines,
            entry.directed,
            digest
        );
    }
    Ok(())
}
