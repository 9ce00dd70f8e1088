//! Stream ingestion, sharded storage, file formats and the command-line
//! pipeline around `funnel-core`.

pub mod cli;
pub mod export;
pub mod gexf;
pub mod parallel;
pub mod record;
pub mod replay;
pub mod stages;
pub mod store;

pub use cli::{cmd_ingest, cmd_pipeline, CliError, IngestSummary, PipelineConfig, PipelineSummary};
pub use export::{write_metrics_csv, write_signature_csv};
pub use gexf::{parse_gexf, write_gexf, GexfError, GexfOptions, ParsedGexf, TweetLabels};
pub use parallel::{betweenness_parallel, centrality_report};
pub use record::{parse_line, parse_tweet, ParseError};
pub use replay::{replay, spawn_replay, MockStream, ReplayError, ReplayStats};
pub use stages::{bucket_by_time, build_bucket_graph, build_graph, StageError};
pub use store::{Document, ShardStore, StoreError, TimeRange};
