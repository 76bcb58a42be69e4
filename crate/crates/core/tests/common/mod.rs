//! Reference implementations written directly from the definitions, with
//! dense matrices and no shared code paths with the library.

#![allow(dead_code)]

pub mod gradcheck;
pub mod props;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkwatch::Graph;

/// Row-normalized dense adjacency; rows without out-edges become a self-loop.
pub fn dense_transition(g: &Graph) -> Array2<f64> {
    let n = g.num_nodes();
    let mut t = Array2::zeros((n, n));
    for u in 0..n {
        let nbrs = g.neighbors(u);
        if nbrs.is_empty() {
            t[[u, u]] = 1.0;
        } else {
            for &v in nbrs {
                t[[u, v]] = 1.0 / nbrs.len() as f64;
            }
        }
    }
    t
}

/// `[T, T², …, T^C]` by repeated dense multiplication.
pub fn dense_powers(t: &Array2<f64>, horizon: usize) -> Vec<Array2<f64>> {
    let mut out = Vec::with_capacity(horizon);
    let mut p = t.clone();
    for _ in 0..horizon {
        out.push(p.clone());
        p = p.dot(t);
    }
    out
}

pub fn naive_softmax(q: &[f64]) -> Vec<f64> {
    let z: f64 = q.iter().map(|x| x.exp()).sum();
    q.iter().map(|x| x.exp() / z).collect()
}

pub fn naive_expectation(g: &Graph, weights: &[f64], m: f64) -> Array2<f64> {
    let n = g.num_nodes();
    let mut e = Array2::zeros((n, n));
    for (w, p) in weights
        .iter()
        .zip(dense_powers(&dense_transition(g), weights.len()))
    {
        e = e + p * (m * w);
    }
    e
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Negative log graph likelihood over ordered pairs `u ≠ v` plus `β ‖q‖²`,
/// with `Q = softmax(q)`.
pub fn naive_objective(
    g: &Graph,
    left: &Array2<f64>,
    right: &Array2<f64>,
    q: &[f64],
    m: f64,
    beta: f64,
) -> f64 {
    let n = g.num_nodes();
    let e = naive_expectation(g, &naive_softmax(q), m);
    let s = left.dot(&right.t());
    let adj = g.adjacency_dense();
    let mut loss = 0.0;
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let p = sigmoid(s[[u, v]]);
            loss -= e[[u, v]] * p.ln();
            if adj[[u, v]] == 0.0 {
                loss -= (1.0 - p).ln();
            }
        }
    }
    loss + beta * q.iter().map(|x| x * x).sum::<f64>()
}

/// Random graph on `n` nodes with roughly `density` of pairs connected.
pub fn random_graph(n: usize, density: f64, directed: bool, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && (directed || u < v) && rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, directed).unwrap().0
}

/// Midrank ROC-AUC by counting all positive/negative pairs.
pub fn naive_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &q in neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}
