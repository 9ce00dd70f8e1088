use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::DiTopology;

/// Component-corrected (Wasserman–Faust) closeness on outgoing distances.
///
/// With `r` nodes reachable from `v` at total distance `d`, the score is
/// `(r / (n - 1)) * (r / d)`, and 0 when nothing is reachable.
pub fn closeness_centrality(topo: &DiTopology) -> Vec<f64> {
    let n = topo.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut touched = Vec::with_capacity(n);
    (0..n)
        .map(|v| {
            for &u in &touched {
                dist[u] = usize::MAX;
            }
            touched.clear();
            dist[v] = 0;
            touched.push(v);
            queue.push_back(v);
            let (mut reached, mut total) = (0usize, 0usize);
            while let Some(u) = queue.pop_front() {
                for &w in topo.out_neighbors(u) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        reached += 1;
                        total += dist[w];
                        touched.push(w);
                        queue.push_back(w);
                    }
                }
            }
            if reached == 0 {
                0.0
            } else {
                let r = reached as f64;
                (r / (n - 1) as f64) * (r / total as f64)
            }
        })
        .collect()
}
