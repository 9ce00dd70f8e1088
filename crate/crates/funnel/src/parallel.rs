//! Multi-threaded betweenness with results identical to the serial version.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use funnel_core::metrics::{betweenness_from_sources, source_blocks};
use funnel_core::{CentralityReport, DiTopology, MultimodalGraph};

/// Worker count to use when none is configured.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

/// Betweenness computed by `workers` threads pulling source blocks from a
/// shared counter. Block partials are added in block order, so the result is
/// bit-identical to the serial computation for any worker count.
pub fn betweenness_parallel(topo: &DiTopology, workers: usize) -> Vec<f64> {
    let n = topo.node_count();
    let blocks: Vec<_> = source_blocks(n).collect();
    let workers = workers.clamp(1, blocks.len().max(1));
    let mut partials: Vec<Option<Vec<f64>>> = vec![None; blocks.len()];
    if workers == 1 {
        for (slot, range) in partials.iter_mut().zip(&blocks) {
            *slot = Some(betweenness_from_sources(topo, range.clone()));
        }
    } else {
        let next = AtomicUsize::new(0);
        let done: Vec<Vec<(usize, Vec<f64>)>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut out = Vec::new();
                        loop {
                            let b = next.fetch_add(1, Ordering::Relaxed);
                            let Some(range) = blocks.get(b) else { break };
                            out.push((b, betweenness_from_sources(topo, range.clone())));
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("betweenness worker panicked")).collect()
        });
        for (b, partial) in done.into_iter().flatten() {
            partials[b] = Some(partial);
        }
    }
    let mut score = vec![0.0; n];
    for partial in partials {
        for (s, p) in score.iter_mut().zip(partial.expect("every block evaluated")) {
            *s += p;
        }
    }
    score
}

/// Full centrality report with betweenness spread over `workers` threads.
pub fn centrality_report(graph: &MultimodalGraph, workers: usize) -> CentralityReport {
    let (topo, _) = DiTopology::from_graph(graph);
    let betweenness = betweenness_parallel(&topo, workers);
    CentralityReport::with_betweenness(graph, &topo, betweenness)
}
