//! ForceAtlas2-style force-directed layout.
//!
//! Per iteration every node feels
//!
//! * linear attraction `p_v - p_u` along each edge,
//! * repulsion `k_r (deg_u + 1)(deg_v + 1) / d` from every other node,
//! * gravity of magnitude `k_g (deg + 1)` toward the origin,
//!
//! where `deg` counts distinct directed edges in both directions. Each node
//! moves by `speed * force`, capped at `max_displacement`. A node's speed halves
//! when its force reverses direction (it swung past an equilibrium) and grows
//! by 20% otherwise, which lets an isolated node settle on the origin instead
//! of orbiting it.
//!
//! Exact O(n²) repulsion, no Barnes–Hut.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DiTopology;
use crate::graph::{MultimodalGraph, NodeKey};

const MIN_DISTANCE: f64 = 1e-12;
const SPEED_GROWTH: f64 = 1.2;
const SPEED_DECAY: f64 = 0.5;
const MAX_SPEED: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.x * self.x + self.y * self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        Point::new(self.x - other.x, self.y - other.y).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    pub repulsion: f64,
    pub gravity: f64,
    pub max_displacement: f64,
    /// Seeded start positions are uniform in `[-spread, spread]²`.
    pub initial_spread: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams { repulsion: 10.0, gravity: 1.0, max_displacement: 10.0, initial_spread: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub positions: BTreeMap<NodeKey, Point>,
    pub iterations_run: usize,
    pub final_max_displacement: f64,
}

/// Deterministic start positions for `n` nodes.
pub fn seeded_positions(n: usize, seed: u64, spread: f64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (0..n)
        .map(|_| {
            let x = (2.0 * unit() - 1.0) * spread;
            let y = (2.0 * unit() - 1.0) * spread;
            Point::new(x, y)
        })
        .collect()
}

/// Lays out `graph` from seeded start positions.
pub fn layout_force(graph: &MultimodalGraph, iterations: usize, seed: u64) -> LayoutResult {
    let params = LayoutParams::default();
    let (topo, keys) = DiTopology::from_graph(graph);
    let start = seeded_positions(keys.len(), seed, params.initial_spread);
    let (positions, final_max_displacement) = run_layout(&topo, start, iterations, &params);
    LayoutResult { positions: keys.into_iter().zip(positions).collect(), iterations_run: iterations, final_max_displacement }
}

/// Runs the iteration from explicit start positions. Returns the final
/// positions and the largest displacement of the last iteration.
pub fn run_layout(topo: &DiTopology, mut pos: Vec<Point>, iterations: usize, params: &LayoutParams) -> (Vec<Point>, f64) {
    let n = topo.node_count();
    assert_eq!(pos.len(), n, "one start position per node");
    let mass: Vec<f64> = (0..n)
        .map(|v| (topo.in_neighbors(v).len() + topo.out_neighbors(v).len() + 1) as f64)
        .collect();
    let mut speed = alloc::vec![1.0; n];
    let mut previous: Vec<Option<Point>> = alloc::vec![None; n];
    let mut force = alloc::vec![Point::default(); n];
    let mut last_max = 0.0;

    for _ in 0..iterations {
        force.iter_mut().for_each(|f| *f = Point::default());

        for u in 0..n {
            for &v in topo.out_neighbors(u) {
                let dx = pos[v].x - pos[u].x;
                let dy = pos[v].y - pos[u].y;
                force[u].x += dx;
                force[u].y += dy;
                force[v].x -= dx;
                force[v].y -= dy;
            }
        }

        for u in 0..n {
            for v in u + 1..n {
                let dx = pos[u].x - pos[v].x;
                let dy = pos[u].y - pos[v].y;
                let d = libm::sqrt(dx * dx + dy * dy);
                if d < MIN_DISTANCE {
                    continue;
                }
                let f = params.repulsion * mass[u] * mass[v] / d;
                let (fx, fy) = (f * dx / d, f * dy / d);
                force[u].x += fx;
                force[u].y += fy;
                force[v].x -= fx;
                force[v].y -= fy;
            }
        }

        last_max = 0.0;
        for v in 0..n {
            let d = pos[v].norm();
            if d >= MIN_DISTANCE {
                let g = params.gravity * mass[v] / d;
                force[v].x -= g * pos[v].x;
                force[v].y -= g * pos[v].y;
            }
            if let Some(prev) = previous[v] {
                if prev.x * force[v].x + prev.y * force[v].y < 0.0 {
                    speed[v] *= SPEED_DECAY;
                } else {
                    speed[v] = (speed[v] * SPEED_GROWTH).min(MAX_SPEED);
                }
            }
            previous[v] = Some(force[v]);

            let mut step = Point::new(speed[v] * force[v].x, speed[v] * force[v].y);
            let len = step.norm();
            if len > params.max_displacement {
                let scale = params.max_displacement / len;
                step = Point::new(step.x * scale, step.y * scale);
            }
            pos[v].x += step.x;
            pos[v].y += step.y;
            last_max = f64::max(last_max, step.norm());
        }
    }
    (pos, last_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind;

    #[test]
    fn zero_iterations_keep_seeded_positions() {
        let mut g = MultimodalGraph::new();
        for h in ["a", "b", "c"] {
            g.upsert_node(NodeKey::user(h), h, false);
        }
        g.add_edge(&NodeKey::user("a"), &NodeKey::user("b"), EdgeKind::Mentions, 1, 0).unwrap();
        let r = layout_force(&g, 0, 7);
        let seeded = seeded_positions(3, 7, 100.0);
        assert_eq!(r.positions.values().copied().collect::<Vec<_>>(), seeded);
        assert_eq!(r.final_max_displacement, 0.0);
    }

    #[test]
    fn isolated_node_settles_on_origin() {
        let topo = DiTopology::from_edges(1, []);
        for seed in 0..20 {
            let start = seeded_positions(1, seed, 100.0);
            let (pos, _) = run_layout(&topo, start, 100, &LayoutParams::default());
            assert!(pos[0].norm() < 1e-6, "seed {seed}: {:?}", pos[0]);
        }
    }

    #[test]
    fn connected_pair_stays_symmetric() {
        let topo = DiTopology::from_edges(2, [(0, 1)]);
        let start = alloc::vec![Point::new(-5.0, 3.0), Point::new(5.0, -3.0)];
        let (pos, _) = run_layout(&topo, start, 300, &LayoutParams::default());
        assert!((pos[0].x + pos[1].x).abs() < 1e-6 && (pos[0].y + pos[1].y).abs() < 1e-6);
        assert!(pos.iter().all(|p| p.x.is_finite() && p.y.is_finite()));
    }

    #[test]
    fn seeds_are_deterministic() {
        assert_eq!(seeded_positions(5, 1, 100.0), seeded_positions(5, 1, 100.0));
        assert_ne!(seeded_positions(5, 1, 100.0), seeded_positions(5, 2, 100.0));
    }
}
