use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DisjointSets, Graph};

/// Train/test partition of a graph's edges plus sampled non-edges.
#[derive(Debug, Clone)]
pub struct LinkSplit {
    pub train_graph: Graph,
    pub train_pos: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub train_neg: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
    pub seed: u64,
    pub fraction: f64,
    pub achieved_fraction: f64,
    pub warnings: Vec<String>,
}

/// Holds out about `fraction` of the edges while keeping the training graph
/// connected.
///
/// A spanning tree built from a random edge order is always kept; the test
/// edges are a uniform sample of the remaining edges, capped by how many
/// exist. Negatives are distinct non-edges of the full graph: as many for
/// testing as there are test edges, and as many for training as there are
/// training edges.
pub fn split_edges(g: &Graph, fraction: f64, seed: u64) -> Result<LinkSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let (components, _) = g.connected_components();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = g.edges();
    edges.shuffle(&mut rng);

    let mut forest = DisjointSets::new(g.num_nodes());
    let mut tree = Vec::new();
    let mut removable = Vec::new();
    for e in edges {
        if forest.union(e.0, e.1) {
            tree.push(e);
        } else {
            removable.push(e);
        }
    }

    let total = g.num_edges();
    let target = (fraction * total as f64).floor() as usize;
    let mut warnings = Vec::new();
    let held_out = target.min(removable.len());
    if held_out < target {
        warnings.push(format!(
            "requested {target} test edges but only {} can be removed without disconnecting the graph",
            removable.len()
        ));
    }
    let test_pos: Vec<_> = removable.drain(..held_out).collect();
    let mut train_pos = tree;
    train_pos.extend(removable);
    train_pos.sort_unstable();
    let mut test_pos = test_pos;
    test_pos.sort_unstable();

    let wanted = test_pos.len() + train_pos.len();
    let negatives = sample_non_edges(g, wanted, &mut rng);
    if negatives.len() < wanted {
        warnings.push(format!(
            "graph has only {} non-edges; wanted {wanted} negatives",
            negatives.len()
        ));
    }
    let split_at = test_pos.len().min(negatives.len());
    let test_neg = negatives[..split_at].to_vec();
    let train_neg = negatives[split_at..].to_vec();

    let train_graph = g.with_edges(&train_pos)?;
    Ok(LinkSplit {
        train_graph,
        achieved_fraction: test_pos.len() as f64 / total as f64,
        train_pos,
        test_pos,
        train_neg,
        test_neg,
        seed,
        fraction,
        warnings,
    })
}

fn non_edge_capacity(g: &Graph) -> usize {
    let n = g.num_nodes();
    let ordered = n * n.saturating_sub(1);
    if g.is_directed() {
        ordered - g.num_arcs()
    } else {
        ordered / 2 - g.num_edges()
    }
}

/// Up to `count` distinct non-edges, uniformly without replacement. Pairs are
/// ordered for directed graphs and `(min, max)` otherwise.
fn sample_non_edges<R: Rng>(g: &Graph, count: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let n = g.num_nodes();
    let available = non_edge_capacity(g);
    let count = count.min(available);
    if count == 0 {
        return Vec::new();
    }
    if available <= 4 * count {
        let mut all = Vec::with_capacity(available);
        for u in 0..n {
            let start = if g.is_directed() { 0 } else { u + 1 };
            for v in start..n {
                if u != v && !g.has_arc(u, v) {
                    all.push((u, v));
                }
            }
        }
        let (chosen, _) = all.partial_shuffle(rng, count);
        return chosen.to_vec();
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let pair = if g.is_directed() {
            (a, b)
        } else {
            (a.min(b), a.max(b))
        };
        if g.has_arc(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    out
}
