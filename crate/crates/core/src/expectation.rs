//! Closed-form expected co-occurrence matrices.
//!
//! A walk started at `v` visits `u` after exactly `k` steps with probability
//! `(T^k)[v, u]`. Weighting each distance by a context coefficient `Q_k` and
//! starting `m` walks per node gives
//!
//! ```text
//! E[D; Q] = m · Σ_{k=1..C} Q_k · T^k
//! ```
//!
//! The fixed DeepWalk and GloVe windows are particular coefficient vectors;
//! the attention mode takes `Q = softmax(q)` with trainable logits `q`.

use ndarray::{Array2, ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TransitionMatrix;
use crate::par;

/// Trainable attention logits over walk distances `1..=C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextParams {
    logits: Vec<f64>,
    walks_per_node: u32,
}

impl ContextParams {
    /// Uniform attention: all logits zero.
    pub fn uniform(horizon: usize, walks_per_node: u32) -> Result<Self> {
        Self::from_logits(vec![0.0; horizon], walks_per_node)
    }

    pub fn from_logits(logits: Vec<f64>, walks_per_node: u32) -> Result<Self> {
        if logits.is_empty() {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if walks_per_node == 0 {
            return Err(Error::InvalidConfig(
                "walks per node must be at least 1".into(),
            ));
        }
        if logits.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFinite("context logits"));
        }
        Ok(ContextParams {
            logits,
            walks_per_node,
        })
    }

    pub fn horizon(&self) -> usize {
        self.logits.len()
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub(crate) fn logits_mut(&mut self) -> &mut [f64] {
        &mut self.logits
    }

    pub fn walks_per_node(&self) -> u32 {
        self.walks_per_node
    }
}

/// Non-negative weights over walk distances `1..=C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextDistribution {
    weights: Vec<f64>,
    normalized: bool,
}

impl ContextDistribution {
    /// Wraps arbitrary non-negative weights (not constrained to the simplex).
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "context weights must be finite and non-negative".into(),
            ));
        }
        Ok(ContextDistribution {
            weights,
            normalized: false,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn horizon(&self) -> usize {
        self.weights.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Shannon entropy (nats) of the weights rescaled to sum to one.
    pub fn entropy(&self) -> f64 {
        let total = self.total();
        self.weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| {
                let p = w / total;
                -p * p.ln()
            })
            .sum()
    }

    /// The weights as a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.weights).expect("finite weights serialize")
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::InvalidConfig("horizon must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// DeepWalk's window: distance `k` survives a uniform `c ~ U{1, C}` draw
/// with probability `1 - (k - 1) / C`.
pub fn deepwalk_coefficients(horizon: usize) -> Result<ContextDistribution> {
    check_horizon(horizon)?;
    let c = horizon as f64;
    ContextDistribution::from_weights((1..=horizon).map(|k| 1.0 - (k as f64 - 1.0) / c).collect())
}

/// GloVe's harmonic weighting `1 / k`.
pub fn glove_coefficients(horizon: usize) -> Result<ContextDistribution> {
    check_horizon(horizon)?;
    ContextDistribution::from_weights((1..=horizon).map(|k| 1.0 / k as f64).collect())
}

/// Max-shifted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&q| (q - max).exp()).collect();
    let z: f64 = out.iter().sum();
    for p in &mut out {
        *p /= z;
    }
    out
}

pub fn softmax_context(params: &ContextParams) -> ContextDistribution {
    ContextDistribution {
        weights: softmax(params.logits()),
        normalized: true,
    }
}

/// Dense `|V| × |V|` co-occurrence counts or their expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix(Array2<f64>);

impl CooccurrenceMatrix {
    pub fn new(values: Array2<f64>) -> Self {
        CooccurrenceMatrix(values)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    pub fn num_nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn sum(&self) -> f64 {
        self.0.sum()
    }
}

/// Source of the successive powers `T^1, …, T^C`.
///
/// `Streaming` keeps two dense buffers and multiplies by the sparse `T` on
/// the fly; `Cached` holds every power and trades memory for speed when the
/// same powers are revisited many times.
pub enum TransitionPowers<'a> {
    Streaming {
        transition: &'a TransitionMatrix,
        horizon: usize,
    },
    Cached(Vec<Array2<f64>>),
}

impl<'a> TransitionPowers<'a> {
    pub fn streaming(transition: &'a TransitionMatrix, horizon: usize) -> Self {
        TransitionPowers::Streaming {
            transition,
            horizon,
        }
    }

    pub fn cached(transition: &TransitionMatrix, horizon: usize) -> Self {
        let mut powers = Vec::with_capacity(horizon);
        stream_powers(transition, horizon, |_, p| powers.push(p.to_owned()));
        TransitionPowers::Cached(powers)
    }

    /// Bytes needed to cache `horizon` dense powers over `n` nodes.
    pub fn cache_bytes(n: usize, horizon: usize) -> usize {
        n.saturating_mul(n)
            .saturating_mul(horizon)
            .saturating_mul(std::mem::size_of::<f64>())
    }

    pub fn horizon(&self) -> usize {
        match self {
            TransitionPowers::Streaming { horizon, .. } => *horizon,
            TransitionPowers::Cached(p) => p.len(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        match self {
            TransitionPowers::Streaming { transition, .. } => transition.num_nodes(),
            TransitionPowers::Cached(p) => p.first().map_or(0, |m| m.nrows()),
        }
    }

    /// Calls `f(k, T^k)` for `k = 1..=C` in order.
    pub fn for_each<F>(&self, mut f: F)
    where
        F: FnMut(usize, ArrayView2<'_, f64>),
    {
        match self {
            TransitionPowers::Streaming {
                transition,
                horizon,
            } => stream_powers(transition, *horizon, f),
            TransitionPowers::Cached(powers) => {
                for (i, p) in powers.iter().enumerate() {
                    f(i + 1, p.view());
                }
            }
        }
    }
}

fn stream_powers<F>(t: &TransitionMatrix, horizon: usize, mut f: F)
where
    F: FnMut(usize, ArrayView2<'_, f64>),
{
    if horizon == 0 {
        return;
    }
    let n = t.num_nodes();
    let mut current = t.to_dense();
    f(1, current.view());
    if horizon == 1 {
        return;
    }
    let mut next = Array2::zeros((n, n));
    for k in 2..=horizon {
        t.right_multiply_into(current.view(), next.view_mut());
        std::mem::swap(&mut current, &mut next);
        f(k, current.view());
    }
}

/// `m · Σ_k Q_k T^k`, streaming one power at a time.
pub fn expected_cooccurrence(
    t: &TransitionMatrix,
    q: &ContextDistribution,
    walks_per_node: u32,
) -> Result<CooccurrenceMatrix> {
    expected_cooccurrence_from(
        &TransitionPowers::streaming(t, q.horizon()),
        q,
        walks_per_node,
    )
}

pub fn expected_cooccurrence_from(
    powers: &TransitionPowers<'_>,
    q: &ContextDistribution,
    walks_per_node: u32,
) -> Result<CooccurrenceMatrix> {
    if powers.horizon() != q.horizon() {
        return Err(Error::DimensionMismatch {
            context: "context distribution length",
            expected: powers.horizon().to_string(),
            found: q.horizon().to_string(),
        });
    }
    let n = powers.num_nodes();
    let m = f64::from(walks_per_node);
    let mut acc = Array2::zeros((n, n));
    powers.for_each(|k, p| {
        let w = m * q.weights()[k - 1];
        Zip::from(&mut acc).and(&p).for_each(|a, &x| *a += w * x);
    });
    Ok(CooccurrenceMatrix(acc))
}

/// Frobenius inner product `⟨a, b⟩`, reduced in row order.
pub fn frobenius_inner(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    par::sum_rows(a.nrows(), |i| {
        a.row(i)
            .iter()
            .zip(b.row(i).iter())
            .map(|(x, y)| x * y)
            .sum()
    })
}

fn check_square(context: &'static str, n: usize, w: ArrayView2<'_, f64>) -> Result<()> {
    if w.dim() != (n, n) {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", w.nrows(), w.ncols()),
        });
    }
    Ok(())
}

/// `c_k = m · ⟨T^k, W⟩` for `k = 1..=C`: the derivative of `⟨E[D; Q], W⟩`
/// with respect to `Q_k`.
pub fn per_power_contraction(
    t: &TransitionMatrix,
    horizon: usize,
    walks_per_node: u32,
    w: ArrayView2<'_, f64>,
) -> Result<Vec<f64>> {
    check_horizon(horizon)?;
    per_power_contraction_from(&TransitionPowers::streaming(t, horizon), walks_per_node, w)
}

pub fn per_power_contraction_from(
    powers: &TransitionPowers<'_>,
    walks_per_node: u32,
    w: ArrayView2<'_, f64>,
) -> Result<Vec<f64>> {
    check_square("contraction weights", powers.num_nodes(), w)?;
    let m = f64::from(walks_per_node);
    let mut out = Vec::with_capacity(powers.horizon());
    powers.for_each(|_, p| out.push(m * frobenius_inner(p, w)));
    Ok(out)
}

/// One pass over the powers producing both `E[D; Q]` and the per-power
/// contraction against `w`.
pub fn expectation_and_contraction(
    powers: &TransitionPowers<'_>,
    q: &ContextDistribution,
    walks_per_node: u32,
    w: ArrayView2<'_, f64>,
) -> Result<(CooccurrenceMatrix, Vec<f64>)> {
    let n = powers.num_nodes();
    check_square("contraction weights", n, w)?;
    if powers.horizon() != q.horizon() {
        return Err(Error::DimensionMismatch {
            context: "context distribution length",
            expected: powers.horizon().to_string(),
            found: q.horizon().to_string(),
        });
    }
    let m = f64::from(walks_per_node);
    let mut acc = Array2::zeros((n, n));
    let mut contraction = Vec::with_capacity(q.horizon());
    powers.for_each(|k, p| {
        let coef = m * q.weights()[k - 1];
        Zip::from(&mut acc).and(&p).for_each(|a, &x| *a += coef * x);
        contraction.push(m * frobenius_inner(p, w));
    });
    Ok((CooccurrenceMatrix(acc), contraction))
}
