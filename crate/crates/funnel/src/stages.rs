//! Funnel stages that read from the store: graph building and bucketing.

use funnel_core::{bucket_start, bucket_tweets, BucketError, CleanTweet, GraphError, MultimodalGraph, TimeBucketSeries};

use crate::store::{ShardStore, StoreError, TimeRange};

#[derive(Debug, thiserror::Error)]
pub enum StageError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bucket(#[from] BucketError),
}

fn load(store: &ShardStore, topic: &str, range: Option<TimeRange>) -> Result<Vec<CleanTweet>, StoreError> {
    store.scan_collection(topic, range)?.map(|d| d.map(|d| d.payload)).collect()
}

/// Multimodal graph over every stored tweet of `topic` in `range`.
pub fn build_graph(store: &ShardStore, topic: &str, range: Option<TimeRange>) -> Result<MultimodalGraph, StageError> {
    let mut graph = MultimodalGraph::new();
    for doc in store.scan_collection(topic, range)? {
        graph.add_tweet(&doc?.payload)?;
    }
    Ok(graph)
}

/// Graph of the bucket `[start, start + width)`.
pub fn build_bucket_graph(store: &ShardStore, topic: &str, start: i64, width: i64) -> Result<MultimodalGraph, StageError> {
    bucket_start(start, width)?;
    let end = start.checked_add(width).ok_or(BucketError::InvalidWidth(width))?;
    build_graph(store, topic, Some(TimeRange::new(start, end)?))
}

/// Activity signature of every stored tweet of `topic`.
pub fn bucket_by_time(store: &ShardStore, topic: &str, width: i64) -> Result<TimeBucketSeries, StageError> {
    bucket_start(0, width)?;
    let tweets = load(store, topic, None)?;
    Ok(bucket_tweets(&tweets, width)?)
}
