//! Brute-force reference implementations used as test oracles.
//!
//! Nothing here shares code with the library's BFS/Brandes paths: distances
//! come from Floyd–Warshall over a dense matrix, betweenness from explicit
//! enumeration of every shortest path, and eigenvector scores from dense
//! matrix power iteration.
#![allow(dead_code)]

use rand::Rng;

/// Seeded G(n, p) digraph without self-loops, as an edge list.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            adj[u][v] = true;
        }
    }
    adj
}

/// All-pairs directed hop distances; `None` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<usize>>> {
    let adj = adjacency(n, edges);
    let mut d = vec![vec![None; n]; n];
    for u in 0..n {
        d[u][u] = Some(0);
        for v in 0..n {
            if adj[u][v] {
                d[u][v] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, as full node sequences.
pub fn shortest_paths(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> Vec<Vec<usize>> {
    let adj = adjacency(n, edges);
    let Some(len) = floyd_warshall(n, edges)[s][t] else { return Vec::new() };
    let mut found = Vec::new();
    let mut path = vec![s];
    fn walk(adj: &[Vec<bool>], t: usize, len: usize, path: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() - 1 == len {
            if last == t {
                found.push(path.clone());
            }
            return;
        }
        for w in 0..adj.len() {
            if adj[last][w] && !path.contains(&w) {
                path.push(w);
                walk(adj, t, len, path, found);
                path.pop();
            }
        }
    }
    walk(&adj, t, len, &mut path, &mut found);
    found
}

/// Raw directed betweenness by path enumeration.
pub fn betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let paths = shortest_paths(n, edges, s, t);
            if paths.is_empty() {
                continue;
            }
            let sigma = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    score[v] += 1.0 / sigma;
                }
            }
        }
    }
    score
}

/// Sum over ordered reachable pairs of (distance - 1).
pub fn interior_length_total(n: usize, edges: &[(usize, usize)]) -> f64 {
    let d = floyd_warshall(n, edges);
    let mut total = 0.0;
    for s in 0..n {
        for t in 0..n {
            if s != t {
                if let Some(len) = d[s][t] {
                    total += (len - 1) as f64;
                }
            }
        }
    }
    total
}

/// Wasserman–Faust closeness from Floyd–Warshall distances.
pub fn closeness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let d = floyd_warshall(n, edges);
    (0..n)
        .map(|v| {
            let reach: Vec<usize> = (0..n).filter(|&u| u != v).filter_map(|u| d[v][u]).collect();
            if reach.is_empty() {
                return 0.0;
            }
            let r = reach.len() as f64;
            let sum: usize = reach.iter().sum();
            (r / (n - 1) as f64) * (r / sum as f64)
        })
        .collect()
}

/// Dense power iteration on the shifted undirected adjacency `A + I`,
/// run for a fixed number of steps, then max-normalized.
pub fn eigenvector_dense(n: usize, edges: &[(usize, usize)], steps: usize) -> Vec<f64> {
    let mut m = vec![vec![0.0; n]; n];
    let mut any = false;
    for &(u, v) in edges {
        if u != v {
            m[u][v] = 1.0;
            m[v][u] = 1.0;
            any = true;
        }
    }
    if !any {
        return vec![0.0; n];
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut x = vec![1.0; n];
    for _ in 0..steps {
        let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * x[j]).sum()).collect();
        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        x = y.into_iter().map(|a| a / norm).collect();
    }
    let max = x.iter().cloned().fold(0.0, f64::max);
    x.into_iter().map(|a| a / max).collect()
}

/// Relabels edge endpoints through `perm`.
pub fn permute(edges: &[(usize, usize)], perm: &[usize]) -> Vec<(usize, usize)> {
    edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect()
}
