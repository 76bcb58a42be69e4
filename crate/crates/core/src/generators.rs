//! Seeded random graphs for tests, demos and smoke runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// G(n, p): every unordered pair (ordered pair when `directed`) is an edge
/// independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, directed: bool, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        let start = if directed { 0 } else { u + 1 };
        for v in start..n {
            if u != v && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, directed)
        .expect("ids in range")
        .0
}

/// Planted partition: `blocks` communities of `block_size` nodes, edge
/// probability `p_in` inside a community and `p_out` across. Node `u`
/// belongs to community `u / block_size`.
pub fn planted_partition(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Graph {
    let n = blocks * block_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / block_size == v / block_size {
                p_in
            } else {
                p_out
            };
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, false).expect("ids in range").0
}

/// Connected variant of [`planted_partition`]: a ring through all nodes is
/// added so that every node has an edge and the graph is connected.
pub fn connected_planted_partition(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Graph {
    let g = planted_partition(blocks, block_size, p_in, p_out, seed);
    let n = g.num_nodes();
    let mut edges = g.edges();
    edges.extend((0..n).map(|u| (u, (u + 1) % n)));
    g.with_edges(&edges).expect("ids in range")
}
