//! Eigenvector centrality by power iteration on the undirected view.
//!
//! The iteration multiplies by `A + I` rather than `A`. Both share the
//! dominant eigenvector, but the shift breaks the `+λ / -λ` tie that makes
//! plain power iteration oscillate forever on bipartite graphs such as stars
//! (and every interaction graph here is close to bipartite).

use alloc::vec;
use alloc::vec::Vec;

use super::DiTopology;

pub const TOLERANCE: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorScores {
    /// Max-normalized to `[0, 1]`; all zeros for an edgeless graph.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("eigenvector centrality did not converge within {iterations} iterations")]
pub struct NonConvergence {
    pub iterations: usize,
}

impl EigenvectorScores {
    /// The scores, or an error carrying the iteration count when the
    /// tolerance was not met.
    pub fn converged_values(&self) -> Result<&[f64], NonConvergence> {
        if self.converged {
            Ok(&self.values)
        } else {
            Err(NonConvergence { iterations: self.iterations })
        }
    }
}

/// Power iteration from the all-ones vector.
pub fn eigenvector_centrality(topo: &DiTopology) -> EigenvectorScores {
    eigenvector_centrality_from(topo, &vec![1.0; topo.node_count()])
}

/// Power iteration from an explicit non-negative, non-zero start vector.
pub fn eigenvector_centrality_from(topo: &DiTopology, start: &[f64]) -> EigenvectorScores {
    let n = topo.node_count();
    assert_eq!(start.len(), n, "one start value per node");
    if topo.edge_count() == 0 {
        return EigenvectorScores { values: vec![0.0; n], iterations: 0, converged: true };
    }
    let neighbors: Vec<Vec<usize>> = (0..n).map(|v| topo.undirected_neighbors(v)).collect();

    let mut x = start.to_vec();
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        for (v, slot) in next.iter_mut().enumerate() {
            *slot = x[v] + neighbors[v].iter().map(|&u| x[u]).sum::<f64>();
        }
        let norm = libm::sqrt(next.iter().map(|a| a * a).sum::<f64>());
        let mut change: f64 = 0.0;
        for (a, b) in next.iter_mut().zip(&x) {
            *a /= norm;
            change = change.max((*a - b).abs());
        }
        core::mem::swap(&mut x, &mut next);
        if change < TOLERANCE {
            converged = true;
            break;
        }
    }

    let max = x.iter().copied().fold(0.0, f64::max);
    for a in &mut x {
        *a /= max;
    }
    EigenvectorScores { values: x, iterations, converged }
}
