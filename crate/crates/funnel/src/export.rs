//! CSV outputs: activity signatures and per-node metrics.

use std::collections::BTreeMap;

use chrono::DateTime;
use funnel_core::{CentralityReport, NodeKey, Point, TimeBucketSeries};

pub const SIGNATURE_HEADER: [&str; 5] = ["bucket_start_iso", "bucket_start_epoch", "tweets", "actors", "mentions"];
pub const METRICS_HEADER: [&str; 8] = ["node_id", "kind", "label", "in_deg", "out_deg", "betweenness", "closeness", "eigenvector"];

/// `1970-01-01T05:00:00Z` style UTC timestamp.
pub fn iso_utc(epoch: i64) -> String {
    match DateTime::from_timestamp(epoch, 0) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        None => epoch.to_string(),
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory CSV writer does not fail");
    String::from_utf8(bytes).expect("CSV built from UTF-8 fields")
}

/// One row per bucket, in time order.
pub fn write_signature_csv(series: &TimeBucketSeries) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SIGNATURE_HEADER).expect("in-memory CSV write");
    for b in &series.buckets {
        w.write_record([
            iso_utc(b.start),
            b.start.to_string(),
            b.tweet_count.to_string(),
            b.unique_actor_count.to_string(),
            b.mention_edge_count.to_string(),
        ])
        .expect("in-memory CSV write");
    }
    finish(w)
}

/// One row per node in report order; `x`/`y` columns are added when
/// `positions` is given.
pub fn write_metrics_csv(report: &CentralityReport, positions: Option<&BTreeMap<NodeKey, Point>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = METRICS_HEADER.to_vec();
    if positions.is_some() {
        header.extend(["x", "y"]);
    }
    w.write_record(&header).expect("in-memory CSV write");
    for n in &report.nodes {
        let mut row = vec![
            n.key.to_string(),
            n.kind().as_str().to_string(),
            n.label.clone(),
            n.degree.in_degree.to_string(),
            n.degree.out_degree.to_string(),
            n.betweenness.to_string(),
            n.closeness.to_string(),
            n.eigenvector.to_string(),
        ];
        if let Some(positions) = positions {
            let p = positions.get(&n.key).copied().unwrap_or_default();
            row.extend([p.x.to_string(), p.y.to_string()]);
        }
        w.write_record(&row).expect("in-memory CSV write");
    }
    finish(w)
}
