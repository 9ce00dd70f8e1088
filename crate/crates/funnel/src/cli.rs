//! Command-line front end. Every funnel stage is a subcommand over a shared
//! store root; `pipeline` runs them all.
//!
//! Exit codes: 0 success, 1 usage error, 2 partial failure, 3 fatal I/O.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::net::ToSocketAddrs;
use std::path::{Path, PathBuf};

use chrono::DateTime;
use clap::{Args, Parser, Subcommand, ValueEnum};
use funnel_core::{
    filter_by_degree, layout_force, topic_match, CleanTweet, FilterSpec, MultimodalGraph, Topic, DEFAULT_BUCKET_WIDTH,
};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::export::{write_metrics_csv, write_signature_csv};
use crate::gexf::{write_gexf, GexfOptions, TweetLabels};
use crate::parallel::{centrality_report, default_workers};
use crate::replay::{connect, spawn_replay, ReplayError};
use crate::stages::{bucket_by_time, build_graph, StageError};
use crate::store::{ShardStore, StoreError, TimeRange};

pub const DEFAULT_SHARDS: usize = 3;
pub const DEFAULT_BUCKET_HOURS: f64 = 5.0;
pub const DEFAULT_LAYOUT_ITERATIONS: usize = 200;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} buckets failed")]
    Partial { failed: usize, total: usize },
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Replay(ReplayError::InvalidSpeed(_)) => 1,
            CliError::Store(StoreError::InvalidTopicName(_) | StoreError::ZeroShards | StoreError::ShardCountMismatch { .. }) => 1,
            CliError::Partial { .. } => 2,
            _ => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_context(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

#[derive(Debug, Parser)]
#[command(name = "funnel", version, about = "Funnel topical tweet streams into filtered interaction networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a JSON-lines stream, keep tweets matching the topic and store them.
    Ingest(Options),
    /// Write the activity signature (per-bucket counts) as CSV.
    Bucket(Options),
    /// Build the multimodal graph and write it as GEXF.
    Build(Options),
    /// Build, apply the degree filter and write GEXF.
    Filter(Options),
    /// Build, filter and write per-node centralities as CSV.
    Metrics(Options),
    /// Like `metrics`, with x/y layout columns appended.
    Layout(Options),
    /// Write the filtered, laid-out graph (gexf) or the signature (csv).
    Export(Options),
    /// Ingest, then write the signature and per-bucket GEXF and metrics files.
    Pipeline(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Gexf,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    Text,
    Id,
}

/// Flags shared by all subcommands. Every field may also come from the
/// `--config` JSON file; flags given on the command line win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// JSON file with defaults for any of these options.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Store root directory [default: store].
    #[arg(long = "store", value_name = "PATH")]
    pub store_root: Option<PathBuf>,
    /// Topic (collection) name.
    #[arg(long)]
    pub topic: Option<String>,
    /// Comma-separated topic keywords [default: the topic name].
    #[arg(long, value_delimiter = ',')]
    pub keywords: Option<Vec<String>>,
    /// JSON-lines input: a file path, `-` for stdin, or tcp://HOST:PORT.
    #[arg(long)]
    pub input: Option<String>,
    /// Replay speed multiplier; 0 replays as fast as possible [default: 0].
    #[arg(long)]
    pub speed: Option<f64>,
    /// Shard count used when creating the store [default: 3].
    #[arg(long = "shards")]
    pub shard_count: Option<usize>,
    /// Keep nodes with in- or out-degree strictly above this [default: 0].
    #[arg(long)]
    pub min_degree: Option<usize>,
    /// Remove retweet nodes before filtering.
    #[arg(long)]
    pub drop_retweets: bool,
    /// Remove nodes left without edges after filtering.
    #[arg(long)]
    pub drop_isolated: bool,
    /// Bucket width in hours [default: 5].
    #[arg(long)]
    pub bucket_hours: Option<f64>,
    /// Restrict graph commands to the bucket starting here (ISO 8601).
    #[arg(long, value_name = "ISO8601")]
    pub bucket_start: Option<String>,
    /// Output format for `export` [default: gexf].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (directory for `pipeline`) [default: stdout, or out/ for pipeline].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Emit edge start times (first_seen) as a dynamic GEXF.
    #[arg(long)]
    pub dynamic: bool,
    /// Tweet node labels in GEXF output [default: text].
    #[arg(long, value_enum)]
    pub tweet_labels: Option<LabelMode>,
    /// Layout seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Layout iterations [default: 200].
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Betweenness worker threads [default: available cores].
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub store_root: PathBuf,
    pub topic: Topic,
    pub shard_count: usize,
    pub bucket_width: i64,
    pub bucket_start: Option<i64>,
    pub filter: FilterSpec,
    pub speed: f64,
    pub seed: u64,
    pub iterations: usize,
    pub workers: usize,
    pub gexf: GexfOptions,
    pub format: Format,
    pub input: Option<String>,
    pub out: Option<PathBuf>,
}

impl PipelineConfig {
    /// A configuration with defaults for everything but the store and topic.
    pub fn new(store_root: impl Into<PathBuf>, topic: Topic) -> Self {
        PipelineConfig {
            store_root: store_root.into(),
            topic,
            shard_count: DEFAULT_SHARDS,
            bucket_width: DEFAULT_BUCKET_WIDTH,
            bucket_start: None,
            filter: FilterSpec::new(0),
            speed: 0.0,
            seed: 0,
            iterations: DEFAULT_LAYOUT_ITERATIONS,
            workers: default_workers(),
            gexf: GexfOptions::default(),
            format: Format::Gexf,
            input: None,
            out: None,
        }
    }

    /// Merges command-line flags over the optional config file.
    pub fn resolve(flags: &Options) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<Options>(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => Options::default(),
        };
        let o = Options {
            config: None,
            store_root: flags.store_root.clone().or(file.store_root),
            topic: flags.topic.clone().or(file.topic),
            keywords: flags.keywords.clone().or(file.keywords),
            input: flags.input.clone().or(file.input),
            speed: flags.speed.or(file.speed),
            shard_count: flags.shard_count.or(file.shard_count),
            min_degree: flags.min_degree.or(file.min_degree),
            drop_retweets: flags.drop_retweets || file.drop_retweets,
            drop_isolated: flags.drop_isolated || file.drop_isolated,
            bucket_hours: flags.bucket_hours.or(file.bucket_hours),
            bucket_start: flags.bucket_start.clone().or(file.bucket_start),
            format: flags.format.or(file.format),
            out: flags.out.clone().or(file.out),
            dynamic: flags.dynamic || file.dynamic,
            tweet_labels: flags.tweet_labels.or(file.tweet_labels),
            seed: flags.seed.or(file.seed),
            iterations: flags.iterations.or(file.iterations),
            workers: flags.workers.or(file.workers),
        };

        let name = o.topic.ok_or_else(|| usage("--topic is required"))?;
        let keywords = o.keywords.unwrap_or_else(|| vec![name.clone()]);
        let topic = Topic::new(name, keywords).map_err(|e| usage(format!("invalid topic: {e}")))?;
        let mut cfg = PipelineConfig::new(o.store_root.unwrap_or_else(|| PathBuf::from("store")), topic);

        if let Some(n) = o.shard_count {
            if n == 0 {
                return Err(usage("--shards must be at least 1"));
            }
            cfg.shard_count = n;
        }
        let hours = o.bucket_hours.unwrap_or(DEFAULT_BUCKET_HOURS);
        let width = (hours * 3600.0).round();
        if !hours.is_finite() || width < 1.0 || width > i64::MAX as f64 {
            return Err(usage(format!("--bucket-hours must be positive, got {hours}")));
        }
        cfg.bucket_width = width as i64;
        if let Some(s) = o.bucket_start {
            cfg.bucket_start = Some(parse_iso(&s)?);
        }
        if let Some(speed) = o.speed {
            if !speed.is_finite() || speed < 0.0 {
                return Err(usage(format!("--speed must be >= 0, got {speed}")));
            }
            cfg.speed = speed;
        }
        cfg.filter = FilterSpec { min_degree: o.min_degree.unwrap_or(0), drop_retweets: o.drop_retweets, drop_isolated_after: o.drop_isolated };
        cfg.seed = o.seed.unwrap_or(0);
        cfg.iterations = o.iterations.unwrap_or(DEFAULT_LAYOUT_ITERATIONS);
        if let Some(w) = o.workers {
            cfg.workers = w.max(1);
        }
        cfg.gexf = GexfOptions {
            dynamic: o.dynamic,
            tweet_labels: match o.tweet_labels {
                Some(LabelMode::Id) => TweetLabels::Id,
                _ => TweetLabels::Text,
            },
        };
        cfg.format = o.format.unwrap_or(Format::Gexf);
        cfg.input = o.input;
        cfg.out = o.out;
        Ok(cfg)
    }

    fn range(&self) -> Option<TimeRange> {
        self.bucket_start.map(|s| TimeRange { start: s, end: s.saturating_add(self.bucket_width) })
    }
}

/// Seconds since the epoch from an RFC 3339 timestamp or a bare
/// `YYYY-MM-DDTHH:MM:SS` (taken as UTC).
pub fn parse_iso(s: &str) -> Result<i64, CliError> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.timestamp());
    }
    chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .map(|dt| dt.and_utc().timestamp())
        .map_err(|_| usage(format!("invalid ISO 8601 timestamp {s:?}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IngestSummary {
    pub parsed: u64,
    pub matched: u64,
    pub stored: u64,
    pub reordered: u64,
    pub parse_errors: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PipelineSummary {
    pub ingest: IngestSummary,
    pub buckets: usize,
    pub written: Vec<PathBuf>,
    pub failed_buckets: Vec<i64>,
}

fn open_store(cfg: &PipelineConfig) -> Result<ShardStore, CliError> {
    Ok(ShardStore::open(&cfg.store_root, cfg.shard_count)?)
}

fn open_input(input: &str) -> Result<Box<dyn BufRead + Send>, CliError> {
    if input == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    if let Some(addr) = input.strip_prefix("tcp://") {
        let addr = addr
            .to_socket_addrs()
            .map_err(io_context(format!("cannot resolve {input}")))?
            .next()
            .ok_or_else(|| usage(format!("no address for {input}")))?;
        return Ok(Box::new(connect(addr).map_err(io_context(format!("cannot connect to {input}")))?));
    }
    let file = File::open(input).map_err(io_context(format!("cannot read input {input}")))?;
    Ok(Box::new(BufReader::with_capacity(1 << 16, file)))
}

/// Replays `input` and stores every tweet that matches the topic.
pub fn cmd_ingest(cfg: &PipelineConfig, input: &str) -> Result<IngestSummary, CliError> {
    let source = open_input(input)?;
    let store = open_store(cfg)?;
    let topic = &cfg.topic.name;
    store.register_topic(topic)?;

    let (rx, handle) = spawn_replay(source, cfg.speed);
    let mut summary = IngestSummary::default();
    let mut failure = None;
    for raw in rx.iter() {
        // Topic keywords were validated when the config was resolved.
        if !topic_match(&raw, &cfg.topic).unwrap_or(false) {
            continue;
        }
        summary.matched += 1;
        if let Err(e) = store.put_tweet(topic, CleanTweet::from_raw(raw)) {
            failure = Some(e);
            break;
        }
        summary.stored += 1;
    }
    drop(rx);
    let replayed = handle.join().expect("replay thread panicked");
    store.sync()?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let stats = replayed?;
    summary.parsed = stats.emitted;
    summary.reordered = stats.reordered;
    summary.parse_errors = stats.parse_errors;
    info!("ingest {input}: {summary:?}");
    Ok(summary)
}

fn filtered_graph(cfg: &PipelineConfig, store: &ShardStore) -> Result<MultimodalGraph, CliError> {
    let graph = build_graph(store, &cfg.topic.name, cfg.range())?;
    Ok(filter_by_degree(&graph, &cfg.filter))
}

fn graph_store(cfg: &PipelineConfig) -> Result<ShardStore, CliError> {
    let store = open_store(cfg)?;
    if !store.has_topic(&cfg.topic.name) {
        return Err(StoreError::UnknownTopic(cfg.topic.name.clone()).into());
    }
    Ok(store)
}

/// Writes `content` to `path` via a temporary file and rename, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let name = path.file_name().ok_or_else(|| usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, content).map_err(io_context(format!("cannot write {}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(io_context(format!("cannot write {}", path.display())))
}

fn emit(cfg: &PipelineConfig, content: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => write_atomic(path, content),
        None => stdout.write_all(content.as_bytes()).map_err(io_context("cannot write to stdout")),
    }
}

/// Per-bucket artifacts for one graph: filtered GEXF with layout positions and
/// metrics CSV with x/y columns.
fn bucket_artifacts(cfg: &PipelineConfig, store: &ShardStore, start: i64) -> Result<(String, String), CliError> {
    let bucket_cfg = PipelineConfig { bucket_start: Some(start), ..cfg.clone() };
    let graph = filtered_graph(&bucket_cfg, store)?;
    let report = centrality_report(&graph, cfg.workers);
    if !report.eigenvector_converged {
        warn!("bucket {start}: eigenvector centrality did not converge in {} iterations", report.eigenvector_iterations);
    }
    let layout = layout_force(&graph, cfg.iterations, cfg.seed);
    let gexf = write_gexf(&graph, Some(&layout.positions), &cfg.gexf);
    let metrics = write_metrics_csv(&report, Some(&layout.positions));
    Ok((gexf, metrics))
}

/// Ingests `input`, then writes `signature.csv` plus `bucket-<epoch>.gexf`
/// and `bucket-<epoch>-metrics.csv` for every non-empty bucket into `out_dir`.
/// A failing bucket is logged and skipped; the error reports how many failed.
pub fn cmd_pipeline(cfg: &PipelineConfig, input: &str, out_dir: &Path) -> Result<PipelineSummary, CliError> {
    let ingest = cmd_ingest(cfg, input)?;
    let store = graph_store(cfg)?;
    fs::create_dir_all(out_dir).map_err(io_context(format!("cannot create {}", out_dir.display())))?;

    let series = bucket_by_time(&store, &cfg.topic.name, cfg.bucket_width)?;
    let signature = out_dir.join("signature.csv");
    write_atomic(&signature, &write_signature_csv(&series))?;
    let mut summary = PipelineSummary { ingest, buckets: series.buckets.len(), written: vec![signature], failed_buckets: Vec::new() };

    for bucket in &series.buckets {
        let gexf_path = out_dir.join(format!("bucket-{}.gexf", bucket.start));
        let metrics_path = out_dir.join(format!("bucket-{}-metrics.csv", bucket.start));
        let result = bucket_artifacts(cfg, &store, bucket.start)
            .and_then(|(gexf, metrics)| {
                write_atomic(&metrics_path, &metrics)?;
                write_atomic(&gexf_path, &gexf)
            });
        match result {
            Ok(()) => summary.written.extend([gexf_path, metrics_path]),
            Err(e) => {
                warn!("bucket {}: {e}", bucket.start);
                let _ = fs::remove_file(&metrics_path);
                summary.failed_buckets.push(bucket.start);
            }
        }
    }
    Ok(summary)
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (Command::Ingest(o)
    | Command::Bucket(o)
    | Command::Build(o)
    | Command::Filter(o)
    | Command::Metrics(o)
    | Command::Layout(o)
    | Command::Export(o)
    | Command::Pipeline(o)) = command;
    let cfg = PipelineConfig::resolve(o)?;
    let input = || cfg.input.clone().ok_or_else(|| usage("--input is required"));
    match command {
        Command::Ingest(_) => {
            let summary = cmd_ingest(&cfg, &input()?)?;
            writeln!(stdout, "{}", serde_json::to_string(&summary).expect("summary serializes")).map_err(io_context("stdout"))
        }
        Command::Pipeline(_) => {
            let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let summary = cmd_pipeline(&cfg, &input()?, &out_dir)?;
            writeln!(stdout, "{}", serde_json::to_string(&summary).expect("summary serializes")).map_err(io_context("stdout"))?;
            match summary.failed_buckets.len() {
                0 => Ok(()),
                failed => Err(CliError::Partial { failed, total: summary.buckets }),
            }
        }
        Command::Bucket(_) => {
            let store = graph_store(&cfg)?;
            let series = bucket_by_time(&store, &cfg.topic.name, cfg.bucket_width)?;
            emit(&cfg, &write_signature_csv(&series), stdout)
        }
        Command::Build(_) => {
            let store = graph_store(&cfg)?;
            let graph = build_graph(&store, &cfg.topic.name, cfg.range())?;
            emit(&cfg, &write_gexf(&graph, None, &cfg.gexf), stdout)
        }
        Command::Filter(_) => {
            let graph = filtered_graph(&cfg, &graph_store(&cfg)?)?;
            emit(&cfg, &write_gexf(&graph, None, &cfg.gexf), stdout)
        }
        Command::Metrics(_) => {
            let graph = filtered_graph(&cfg, &graph_store(&cfg)?)?;
            emit(&cfg, &write_metrics_csv(&centrality_report(&graph, cfg.workers), None), stdout)
        }
        Command::Layout(_) => {
            let graph = filtered_graph(&cfg, &graph_store(&cfg)?)?;
            let layout = layout_force(&graph, cfg.iterations, cfg.seed);
            emit(&cfg, &write_metrics_csv(&centrality_report(&graph, cfg.workers), Some(&layout.positions)), stdout)
        }
        Command::Export(_) => {
            let store = graph_store(&cfg)?;
            let content = match cfg.format {
                Format::Csv => write_signature_csv(&bucket_by_time(&store, &cfg.topic.name, cfg.bucket_width)?),
                Format::Gexf => {
                    let graph = filtered_graph(&cfg, &store)?;
                    let layout = layout_force(&graph, cfg.iterations, cfg.seed);
                    write_gexf(&graph, Some(&layout.positions), &cfg.gexf)
                }
            };
            emit(&cfg, &content, stdout)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("funnel: {e}");
            e.exit_code()
        }
    }
}
