//! Algorithmic core of the tweet interaction funnel.
//!
//! Everything here is `no_std` with `alloc`: text cleaning and mention
//! extraction, topical keyword matching, shard routing, the multimodal
//! User/Tweet interaction graph, degree filtering, time bucketing, the four
//! centrality measures and a force-directed layout. File formats, storage
//! and the command line live in the `funnel` crate.
//!
//! The funnel runs in stages:
//!
//! 1. raw tweets are matched against a [`Topic`] and cleaned into
//!    [`CleanTweet`]s,
//! 2. cleaned tweets are folded into a [`MultimodalGraph`] with
//!    [`MultimodalGraph::add_tweet`],
//! 3. the graph is reduced with [`filter_by_degree`],
//! 4. the reduced graph is scored with [`CentralityReport::compute`] and laid
//!    out with [`layout_force`].
//!
//! [`bucket_tweets`] produces the per-window activity signature of a topic.
#![no_std]

extern crate alloc;

pub mod bucket;
pub mod filter;
pub mod graph;
pub mod metrics;
pub mod route;
pub mod text;
pub mod tweet;

pub use bucket::{bucket_start, bucket_tweets, ActivityBucket, BucketError, TimeBucketSeries, DEFAULT_BUCKET_WIDTH};
pub use filter::{filter_by_degree, FilterSpec};
pub use graph::{merge_graphs, EdgeData, EdgeKey, EdgeKind, GraphError, MultimodalGraph, NodeData, NodeKey, NodeKind};
pub use metrics::layout::{layout_force, LayoutParams, LayoutResult, Point};
pub use metrics::{degree_centrality, CentralityReport, Degree, DiTopology, NodeCentrality};
pub use route::{fnv1a64, route_key, RouteError};
pub use text::{clean_text, detect_retweet, extract_mentions, fold_handle, is_valid_handle};
pub use tweet::{topic_match, CleanTweet, Geo, RawTweet, Topic, TopicError};
