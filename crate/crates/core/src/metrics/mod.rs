//! Centrality measures and layout over the interaction graph.
//!
//! Betweenness and closeness use directed, unweighted shortest paths.
//! Eigenvector centrality uses the undirected, unweighted view. Edge weights
//! never enter a distance.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use crate::graph::{MultimodalGraph, NodeKey, NodeKind};

pub mod betweenness;
pub mod closeness;
pub mod eigenvector;
pub mod layout;

pub use betweenness::{betweenness_centrality, betweenness_from_sources, source_blocks, SOURCE_BLOCK};
pub use closeness::closeness_centrality;
pub use eigenvector::{eigenvector_centrality, eigenvector_centrality_from, EigenvectorScores, NonConvergence};

/// Index-based simple digraph: no self-loops, no parallel edges, adjacency
/// lists sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiTopology {
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl DiTopology {
    /// Builds a topology on `n` nodes. Self-loops and repeated pairs are dropped.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut out = alloc::vec![Vec::new(); n];
        let mut inc = alloc::vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                out[u].push(v);
                inc[v].push(u);
            }
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        DiTopology { out, inc }
    }

    /// Topology of `graph` with node indices in graph iteration order; the
    /// returned keys map index to node.
    pub fn from_graph(graph: &MultimodalGraph) -> (Self, Vec<NodeKey>) {
        let keys: Vec<NodeKey> = graph.nodes().map(|(k, _)| k.clone()).collect();
        // Keys come out of an ordered map, so binary search recovers indices.
        let index = |k: &NodeKey| keys.binary_search(k).expect("edge endpoint is a node");
        let edges: Vec<(usize, usize)> = graph.edges().map(|(k, _)| (index(&k.source), index(&k.target))).collect();
        (Self::from_edges(keys.len(), edges), keys)
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    /// Sorted, distinct neighbours of `v` ignoring direction.
    pub fn undirected_neighbors(&self, v: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.out[v].iter().chain(&self.inc[v]).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Degree {
    pub in_degree: usize,
    pub out_degree: usize,
    pub total: usize,
}

/// Distinct directed edge counts per node; weights are ignored.
pub fn degree_centrality(topo: &DiTopology) -> Vec<Degree> {
    (0..topo.node_count())
        .map(|v| {
            let (i, o) = (topo.in_neighbors(v).len(), topo.out_neighbors(v).len());
            Degree { in_degree: i, out_degree: o, total: i + o }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeCentrality {
    pub key: NodeKey,
    pub label: String,
    pub degree: Degree,
    pub betweenness: f64,
    pub closeness: f64,
    pub eigenvector: f64,
}

impl NodeCentrality {
    pub fn kind(&self) -> NodeKind {
        self.key.kind
    }
}

/// All four measures for every node, in graph order.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    pub nodes: Vec<NodeCentrality>,
    pub eigenvector_iterations: usize,
    pub eigenvector_converged: bool,
}

impl CentralityReport {
    pub fn compute(graph: &MultimodalGraph) -> Self {
        let (topo, _) = DiTopology::from_graph(graph);
        let betweenness = betweenness_centrality(&topo);
        Self::with_betweenness(graph, &topo, betweenness)
    }

    /// Assembles a report from a precomputed betweenness vector, for callers
    /// that compute betweenness in parallel.
    pub fn with_betweenness(graph: &MultimodalGraph, topo: &DiTopology, betweenness: Vec<f64>) -> Self {
        assert_eq!(betweenness.len(), topo.node_count());
        let degrees = degree_centrality(topo);
        let closeness = closeness_centrality(topo);
        let eigen = eigenvector_centrality(topo);
        let nodes = graph
            .nodes()
            .enumerate()
            .map(|(i, (key, data))| NodeCentrality {
                key: key.clone(),
                label: data.label.clone(),
                degree: degrees[i],
                betweenness: betweenness[i],
                closeness: closeness[i],
                eigenvector: eigen.values[i],
            })
            .collect();
        CentralityReport { nodes, eigenvector_iterations: eigen.iterations, eigenvector_converged: eigen.converged }
    }
}

pub(crate) fn block_ranges(n: usize, block: usize) -> impl Iterator<Item = Range<usize>> {
    (0..n.div_ceil(block)).map(move |b| b * block..((b + 1) * block).min(n))
}
