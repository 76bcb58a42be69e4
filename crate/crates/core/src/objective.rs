//! Negative log graph likelihood and its analytic gradients.
//!
//! With scores `S = L · Rᵀ`, expected co-occurrences `E` and the non-edge
//! indicator `N`, the objective over off-diagonal pairs is
//!
//! ```text
//! Σ_{u≠v} E_uv · softplus(-S_uv) + N_uv · softplus(S_uv)  +  β ‖q‖²
//! ```
//!
//! `∂/∂S = -E ∘ (1 - σ(S)) + N ∘ σ(S)`, which flows to `L` and `R` through
//! the outer product. `E` depends on `Q = softmax(q)` linearly, so
//! `∂/∂Q_k = m · ⟨T^k, softplus(-S)⟩` and the chain rule through the
//! softmax Jacobian gives the logit gradient.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::{
    per_power_contraction_from, softmax, CooccurrenceMatrix, TransitionPowers,
};
use crate::graph::Graph;
use crate::par;

/// Left and right embedding tables, each `|V| × d/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPair {
    left: Array2<f64>,
    right: Array2<f64>,
}

impl EmbeddingPair {
    pub fn new(left: Array2<f64>, right: Array2<f64>) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::DimensionMismatch {
                context: "embedding halves",
                expected: format!("{:?}", left.dim()),
                found: format!("{:?}", right.dim()),
            });
        }
        if left.iter().chain(right.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("embeddings"));
        }
        Ok(EmbeddingPair { left, right })
    }

    /// Entries i.i.d. uniform in `±0.5 / sqrt(d/2)`.
    pub fn random<R: Rng>(num_nodes: usize, dim: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "embedding dimension must be even and at least 2, got {dim}"
            )));
        }
        let half = dim / 2;
        let scale = 0.5 / (half as f64).sqrt();
        let mut draw =
            || Array2::from_shape_simple_fn((num_nodes, half), || rng.random_range(-scale..=scale));
        let left = draw();
        let right = draw();
        Ok(EmbeddingPair { left, right })
    }

    pub fn num_nodes(&self) -> usize {
        self.left.nrows()
    }

    /// Full dimension `d` (both halves).
    pub fn dim(&self) -> usize {
        2 * self.left.ncols()
    }

    pub fn left(&self) -> ArrayView2<'_, f64> {
        self.left.view()
    }

    pub fn right(&self) -> ArrayView2<'_, f64> {
        self.right.view()
    }

    pub(crate) fn halves_mut(&mut self) -> (&mut Array2<f64>, &mut Array2<f64>) {
        (&mut self.left, &mut self.right)
    }

    /// `L_u · R_v`.
    pub fn score(&self, u: usize, v: usize) -> f64 {
        self.left.row(u).dot(&self.right.row(v))
    }
}

/// `S = L · Rᵀ`.
pub fn score_matrix(emb: &EmbeddingPair) -> Array2<f64> {
    emb.left.dot(&emb.right.t())
}

/// Objective value; `curve` holds one record per training epoch when the
/// report comes out of [`crate::train`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub total: f64,
    pub nlgl: f64,
    pub reg: f64,
    pub curve: Vec<EpochRecord>,
}

/// Loss at the start of an epoch together with the context weights used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub total: f64,
    pub nlgl: f64,
    pub reg: f64,
    pub context: Vec<f64>,
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn check_scores(n: usize, s: ArrayView2<'_, f64>, e: &CooccurrenceMatrix, g: &Graph) -> Result<()> {
    for (what, dim) in [("scores", s.dim()), ("co-occurrence", e.view().dim())] {
        if dim != (n, n) {
            return Err(Error::DimensionMismatch {
                context: what,
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", dim.0, dim.1),
            });
        }
    }
    if g.num_nodes() != n {
        return Err(Error::DimensionMismatch {
            context: "graph size",
            expected: n.to_string(),
            found: g.num_nodes().to_string(),
        });
    }
    Ok(())
}

pub fn regularizer(logits: &[f64], beta: f64) -> f64 {
    beta * logits.iter().map(|q| q * q).sum::<f64>()
}

/// Off-diagonal NLGL plus `β ‖q‖²`.
pub fn nlgl_loss(
    e_d: &CooccurrenceMatrix,
    g: &Graph,
    s: ArrayView2<'_, f64>,
    logits: &[f64],
    beta: f64,
) -> Result<LossReport> {
    let n = s.nrows();
    check_scores(n, s, e_d, g)?;
    if s.iter()
        .chain(e_d.as_array().iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::NonFinite("loss inputs"));
    }
    if !beta.is_finite() || logits.iter().any(|q| !q.is_finite()) {
        return Err(Error::NonFinite("regularization inputs"));
    }
    let e = e_d.view();
    let nlgl = par::sum_rows(n, |u| {
        let mut nbrs = g.neighbors(u).iter().peekable();
        let mut acc = 0.0;
        for v in 0..n {
            let is_edge = nbrs.next_if_eq(&&v).is_some();
            if u == v {
                continue;
            }
            let x = s[[u, v]];
            acc += e[[u, v]] * softplus(-x);
            if !is_edge {
                acc += softplus(x);
            }
        }
        acc
    });
    let reg = regularizer(logits, beta);
    Ok(LossReport {
        total: nlgl + reg,
        nlgl,
        reg,
        curve: Vec::new(),
    })
}

/// `softplus(-S)` with a zero diagonal: the per-pair weight that multiplies
/// `E` in the loss.
pub(crate) fn residual_weights(s: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut w = s.to_owned();
    par::for_each_row_mut(&mut w.view_mut(), |u, mut row| {
        row.mapv_inplace(|x| softplus(-x));
        row[u] = 0.0;
    });
    w
}

/// Overwrites `s` with `∂ NLGL / ∂ S` and returns the NLGL value.
/// `w` must be [`residual_weights`] of `s`.
pub(crate) fn nlgl_and_score_gradient(
    e_d: &CooccurrenceMatrix,
    g: &Graph,
    w: ArrayView2<'_, f64>,
    s: &mut Array2<f64>,
) -> f64 {
    let e = e_d.view();
    let partials = par::map_rows_mut(&mut s.view_mut(), |u, mut row| {
        let mut nbrs = g.neighbors(u).iter().peekable();
        let mut acc = 0.0;
        for v in 0..row.len() {
            let is_edge = nbrs.next_if_eq(&&v).is_some();
            if u == v {
                row[v] = 0.0;
                continue;
            }
            let x = row[v];
            let sp_neg = w[[u, v]];
            let sig = (-sp_neg).exp();
            let one_minus_sig = -(-sp_neg).exp_m1();
            let eu = e[[u, v]];
            acc += eu * sp_neg;
            let mut grad = -eu * one_minus_sig;
            if !is_edge {
                acc += if x < -30.0 { x.exp() } else { sp_neg + x };
                grad += sig;
            }
            row[v] = grad;
        }
        acc
    });
    partials.into_iter().sum()
}

/// Logit gradient from per-power contractions `c`:
/// `Σ_j c_j Q_j (δ_jk - Q_k) + 2 β q_k`.
pub fn attention_gradient(contraction: &[f64], q: &[f64], logits: &[f64], beta: f64) -> Vec<f64> {
    let mean: f64 = contraction.iter().zip(q).map(|(c, p)| c * p).sum();
    contraction
        .iter()
        .zip(q)
        .zip(logits)
        .map(|((c, p), l)| p * (c - mean) + 2.0 * beta * l)
        .collect()
}

/// Gradients of the full objective.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub left: Array2<f64>,
    pub right: Array2<f64>,
    pub logits: Vec<f64>,
    pub loss: LossReport,
}

/// Analytic gradients with respect to `L`, `R` and the attention logits,
/// given `E = E[D; softmax(logits)]` built from the same `powers`.
pub fn gradients(
    e_d: &CooccurrenceMatrix,
    powers: &TransitionPowers<'_>,
    walks_per_node: u32,
    g: &Graph,
    emb: &EmbeddingPair,
    logits: &[f64],
    beta: f64,
) -> Result<Gradients> {
    let n = emb.num_nodes();
    if logits.len() != powers.horizon() {
        return Err(Error::DimensionMismatch {
            context: "attention logits",
            expected: powers.horizon().to_string(),
            found: logits.len().to_string(),
        });
    }
    let mut s = score_matrix(emb);
    check_scores(n, s.view(), e_d, g)?;
    let w = residual_weights(s.view());
    let contraction = per_power_contraction_from(powers, walks_per_node, w.view())?;
    let q = softmax(logits);
    let nlgl = nlgl_and_score_gradient(e_d, g, w.view(), &mut s);
    let reg = regularizer(logits, beta);
    let (left, right) = embedding_gradients(&s, emb);
    Ok(Gradients {
        left,
        right,
        logits: attention_gradient(&contraction, &q, logits, beta),
        loss: LossReport {
            total: nlgl + reg,
            nlgl,
            reg,
            curve: Vec::new(),
        },
    })
}

/// `(G · R, Gᵀ · L)` for a score gradient `G`.
pub(crate) fn embedding_gradients(
    g_s: &Array2<f64>,
    emb: &EmbeddingPair,
) -> (Array2<f64>, Array2<f64>) {
    (g_s.dot(&emb.right), g_s.t().dot(&emb.left))
}
