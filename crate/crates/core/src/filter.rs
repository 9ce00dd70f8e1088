//! Degree-threshold funnel filter.
//!
//! This is a single pass over the degrees of the input graph (the degree-range
//! filter of graph viewers), not a k-core peel: a kept hub may be left with
//! fewer than `n` edges once its neighbours are gone.

use crate::graph::{MultimodalGraph, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FilterSpec {
    /// Keep a node iff its in-degree or its out-degree is strictly greater.
    pub min_degree: usize,
    /// Remove retweet Tweet nodes before thresholding.
    pub drop_retweets: bool,
    /// Remove nodes left without edges in a final pass.
    pub drop_isolated_after: bool,
}

impl FilterSpec {
    pub fn new(min_degree: usize) -> Self {
        FilterSpec { min_degree, ..Self::default() }
    }
}

pub fn filter_by_degree(graph: &MultimodalGraph, spec: &FilterSpec) -> MultimodalGraph {
    let base = if spec.drop_retweets {
        graph.induced(|key, node| !(key.kind == NodeKind::Tweet && node.is_retweet))
    } else {
        graph.clone()
    };
    let n = spec.min_degree;
    let kept = base.induced(|_, node| node.in_degree() > n || node.out_degree() > n);
    if spec.drop_isolated_after {
        kept.induced(|_, node| node.in_degree() + node.out_degree() > 0)
    } else {
        kept
    }
}
