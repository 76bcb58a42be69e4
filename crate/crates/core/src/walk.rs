//! Monte-Carlo DeepWalk co-occurrence sampling.
//!
//! Every walk is anchored at its start node: `m` walks leave each node `v`,
//! each draws a window `c ~ U{1, C}` and counts the nodes it visits at steps
//! `1..=c` as contexts of `v`. This is exactly the process whose expectation
//! is `m · Σ_k (1 - (k-1)/C) T^k`, so the simulator serves as an
//! independent check of that closed form.
//!
//! Randomness comes from ChaCha8 with the configured seed; node `v` uses
//! stream `v`, so results are identical regardless of thread count.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::{deepwalk_coefficients, expected_cooccurrence, CooccurrenceMatrix};
use crate::graph::TransitionMatrix;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub walks_per_node: u32,
    pub horizon: usize,
    pub seed: u64,
}

impl WalkConfig {
    fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 || self.horizon == 0 {
            return Err(Error::InvalidConfig(
                "walks per node and horizon must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn node_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn step<R: Rng>(t: &TransitionMatrix, from: usize, rng: &mut R) -> usize {
    let (cols, probs) = t.row(from);
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (&c, &p) in cols.iter().zip(probs) {
        acc += p;
        if r < acc {
            return c;
        }
    }
    *cols.last().expect("transition rows are never empty")
}

struct RowSample {
    counts: Vec<f64>,
    squares: Vec<f64>,
}

fn simulate_row(t: &TransitionMatrix, cfg: &WalkConfig, v: usize) -> RowSample {
    let n = t.num_nodes();
    let mut rng = node_rng(cfg.seed, v as u64);
    let mut counts = vec![0.0; n];
    let mut squares = vec![0.0; n];
    let mut per_walk: Vec<(usize, f64)> = Vec::with_capacity(cfg.horizon);
    for _ in 0..cfg.walks_per_node {
        let window = rng.random_range(1..=cfg.horizon);
        per_walk.clear();
        let mut x = v;
        for k in 1..=cfg.horizon {
            x = step(t, x, &mut rng);
            if k <= window {
                match per_walk.iter_mut().find(|(u, _)| *u == x) {
                    Some((_, c)) => *c += 1.0,
                    None => per_walk.push((x, 1.0)),
                }
            }
        }
        for &(u, c) in &per_walk {
            counts[u] += c;
            squares[u] += c * c;
        }
    }
    RowSample { counts, squares }
}

fn simulate_rows(t: &TransitionMatrix, cfg: &WalkConfig) -> Vec<RowSample> {
    par::map_rows(t.num_nodes(), |v| simulate_row(t, cfg, v))
}

/// Raw co-occurrence counts `D` from `m` start-anchored walks per node.
pub fn simulate_walks(t: &TransitionMatrix, cfg: &WalkConfig) -> Result<CooccurrenceMatrix> {
    cfg.validate()?;
    let n = t.num_nodes();
    let rows = simulate_rows(t, cfg);
    let mut d = Array2::zeros((n, n));
    for (v, row) in rows.into_iter().enumerate() {
        for (u, c) in row.counts.into_iter().enumerate() {
            d[[v, u]] = c;
        }
    }
    Ok(CooccurrenceMatrix::new(d))
}

/// Agreement between simulated `D / m` and the closed-form DeepWalk
/// expectation for a single walk per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub walks_per_node: u32,
    pub horizon: usize,
    pub seed: u64,
    pub num_entries: usize,
    pub max_abs_deviation: f64,
    pub mean_abs_deviation: f64,
    pub fraction_within_3se: f64,
}

pub fn empirical_vs_expected_report(
    t: &TransitionMatrix,
    cfg: &WalkConfig,
) -> Result<OracleReport> {
    cfg.validate()?;
    let n = t.num_nodes();
    let expected = expected_cooccurrence(t, &deepwalk_coefficients(cfg.horizon)?, 1)?;
    let rows = simulate_rows(t, cfg);
    let m = f64::from(cfg.walks_per_node);
    let mut max_dev: f64 = 0.0;
    let mut sum_dev = 0.0;
    let mut within = 0usize;
    for (v, row) in rows.iter().enumerate() {
        for u in 0..n {
            let mean = row.counts[u] / m;
            let var = if cfg.walks_per_node > 1 {
                ((row.squares[u] - m * mean * mean) / (m - 1.0)).max(0.0)
            } else {
                0.0
            };
            let se = (var / m).sqrt();
            let dev = (mean - expected.as_array()[[v, u]]).abs();
            max_dev = max_dev.max(dev);
            sum_dev += dev;
            if dev <= 3.0 * se + 1e-12 {
                within += 1;
            }
        }
    }
    let entries = n * n;
    Ok(OracleReport {
        walks_per_node: cfg.walks_per_node,
        horizon: cfg.horizon,
        seed: cfg.seed,
        num_entries: entries,
        max_abs_deviation: max_dev,
        mean_abs_deviation: sum_dev / entries as f64,
        fraction_within_3se: within as f64 / entries as f64,
    })
}
