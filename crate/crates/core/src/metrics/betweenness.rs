//! Brandes' betweenness for directed, unweighted graphs (raw, not normalized).
//!
//! Sources are processed in fixed blocks of [`SOURCE_BLOCK`]. Each block
//! yields a partial score vector and the partials are added in block order,
//! so a parallel driver that evaluates blocks on any number of workers and
//! sums them in the same order reproduces the serial result bit for bit.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::{block_ranges, DiTopology};

pub const SOURCE_BLOCK: usize = 32;

/// Source blocks in summation order.
pub fn source_blocks(node_count: usize) -> impl Iterator<Item = Range<usize>> {
    block_ranges(node_count, SOURCE_BLOCK)
}

/// Dependency accumulated over the given source nodes only.
pub fn betweenness_from_sources(topo: &DiTopology, sources: Range<usize>) -> Vec<f64> {
    let n = topo.node_count();
    let mut score = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in sources {
        for &v in &order {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
            preds[v].clear();
        }
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in topo.out_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] += sigma[v] * coeff;
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    score
}

pub fn betweenness_centrality(topo: &DiTopology) -> Vec<f64> {
    let mut total = vec![0.0; topo.node_count()];
    for block in source_blocks(topo.node_count()) {
        for (t, p) in total.iter_mut().zip(betweenness_from_sources(topo, block)) {
            *t += p;
        }
    }
    total
}
