//! Joint full-batch training of embeddings and attention logits.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::{
    deepwalk_coefficients, expectation_and_contraction, expected_cooccurrence_from,
    glove_coefficients, softmax_context, ContextDistribution, ContextParams, CooccurrenceMatrix,
    TransitionPowers,
};
use crate::graph::{transition_matrix, Graph};
use crate::objective::{
    attention_gradient, embedding_gradients, nlgl_and_score_gradient, nlgl_loss, regularizer,
    residual_weights, score_matrix, EmbeddingPair, EpochRecord, LossReport,
};
use crate::optim::{Adam, AdamSlot};

/// How the context distribution over walk distances is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMode {
    /// `Q = softmax(q)` with `q` trained jointly.
    Attention,
    /// Fixed `1 - (k-1)/C`.
    DeepWalk,
    /// Fixed `1/k`.
    GloVe,
}

impl ContextMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContextMode::Attention => "attention",
            ContextMode::DeepWalk => "deepwalk",
            ContextMode::GloVe => "glove",
        }
    }
}

impl fmt::Display for ContextMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContextMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "attention" => Ok(ContextMode::Attention),
            "deepwalk" => Ok(ContextMode::DeepWalk),
            "glove" => Ok(ContextMode::GloVe),
            other => Err(Error::InvalidConfig(format!(
                "unknown context mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub horizon: usize,
    pub beta: f64,
    pub walks_per_node: u32,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub context: ContextMode,
    pub optimizer: Optimizer,
    /// Keep all dense transition powers in memory when they fit in this
    /// many bytes; otherwise recompute them every epoch.
    pub power_cache_bytes: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            horizon: 10,
            beta: 0.5,
            walks_per_node: 80,
            learning_rate: 0.05,
            epochs: 200,
            seed: 42,
            context: ContextMode::Attention,
            optimizer: Optimizer::Adam,
            power_cache_bytes: 1 << 30,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim < 2 || !self.dim.is_multiple_of(2) {
            return bad(format!("dim must be even and at least 2, got {}", self.dim));
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.walks_per_node == 0 {
            return bad("walks per node must be at least 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return bad(format!(
                "beta must be finite and non-negative, got {}",
                self.beta
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        Ok(())
    }

    fn fixed_distribution(&self) -> Result<Option<ContextDistribution>> {
        match self.context {
            ContextMode::Attention => Ok(None),
            ContextMode::DeepWalk => deepwalk_coefficients(self.horizon).map(Some),
            ContextMode::GloVe => glove_coefficients(self.horizon).map(Some),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub embeddings: EmbeddingPair,
    /// Final attention logits (all zero and untouched in fixed modes).
    pub context: ContextParams,
    /// Context weights in effect after training.
    pub distribution: ContextDistribution,
    pub report: LossReport,
}

struct Step {
    nlgl: f64,
    reg: f64,
    context: Vec<f64>,
    grad_left: ndarray::Array2<f64>,
    grad_right: ndarray::Array2<f64>,
    grad_logits: Option<Vec<f64>>,
}

enum Target<'a> {
    Learned(TransitionPowers<'a>),
    Fixed(CooccurrenceMatrix, ContextDistribution),
}

struct Objective<'a> {
    graph: &'a Graph,
    target: Target<'a>,
    walks_per_node: u32,
    beta: f64,
}

impl Objective<'_> {
    fn step(&self, emb: &EmbeddingPair, params: &ContextParams) -> Result<Step> {
        let mut s = score_matrix(emb);
        let w = residual_weights(s.view());
        match &self.target {
            Target::Learned(powers) => {
                let q = softmax_context(params);
                let (e, contraction) =
                    expectation_and_contraction(powers, &q, self.walks_per_node, w.view())?;
                let nlgl = nlgl_and_score_gradient(&e, self.graph, w.view(), &mut s);
                drop((e, w));
                let (grad_left, grad_right) = embedding_gradients(&s, emb);
                let grad_logits =
                    attention_gradient(&contraction, q.weights(), params.logits(), self.beta);
                Ok(Step {
                    nlgl,
                    reg: regularizer(params.logits(), self.beta),
                    context: q.weights().to_vec(),
                    grad_left,
                    grad_right,
                    grad_logits: Some(grad_logits),
                })
            }
            Target::Fixed(e, q) => {
                let nlgl = nlgl_and_score_gradient(e, self.graph, w.view(), &mut s);
                drop(w);
                let (grad_left, grad_right) = embedding_gradients(&s, emb);
                Ok(Step {
                    nlgl,
                    reg: 0.0,
                    context: q.weights().to_vec(),
                    grad_left,
                    grad_right,
                    grad_logits: None,
                })
            }
        }
    }

    fn loss(&self, emb: &EmbeddingPair, params: &ContextParams) -> Result<LossReport> {
        let s = score_matrix(emb);
        match &self.target {
            Target::Learned(powers) => {
                let e = expected_cooccurrence_from(
                    powers,
                    &softmax_context(params),
                    self.walks_per_node,
                )?;
                nlgl_loss(&e, self.graph, s.view(), params.logits(), self.beta)
            }
            Target::Fixed(e, _) => nlgl_loss(e, self.graph, s.view(), &[], 0.0),
        }
    }
}

pub fn train(graph: &Graph, cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with(graph, cfg, |_| {})
}

/// [`train`] with a callback invoked after every epoch's loss evaluation.
pub fn train_with<F>(graph: &Graph, cfg: &TrainConfig, mut observer: F) -> Result<TrainOutcome>
where
    F: FnMut(&EpochRecord),
{
    cfg.validate()?;
    let n = graph.num_nodes();
    let t = transition_matrix(graph);
    let powers = if TransitionPowers::cache_bytes(n, cfg.horizon) <= cfg.power_cache_bytes {
        TransitionPowers::cached(&t, cfg.horizon)
    } else {
        TransitionPowers::streaming(&t, cfg.horizon)
    };
    let target = match cfg.fixed_distribution()? {
        None => Target::Learned(powers),
        Some(q) => {
            let e = expected_cooccurrence_from(&powers, &q, cfg.walks_per_node)?;
            Target::Fixed(e, q)
        }
    };
    let objective = Objective {
        graph,
        target,
        walks_per_node: cfg.walks_per_node,
        beta: cfg.beta,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut emb = EmbeddingPair::random(n, cfg.dim, &mut rng)?;
    let mut params = ContextParams::uniform(cfg.horizon, cfg.walks_per_node)?;

    let mut adam = Adam::new(cfg.learning_rate);
    let half = cfg.dim / 2;
    let mut left_slot = AdamSlot::new(n * half);
    let mut right_slot = AdamSlot::new(n * half);
    let mut logit_slot = AdamSlot::new(cfg.horizon);
    let mut curve = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        let step = objective.step(&emb, &params)?;
        let total = step.nlgl + step.reg;
        if !total.is_finite() {
            return Err(Error::Diverged { epoch, loss: total });
        }
        let record = EpochRecord {
            epoch,
            total,
            nlgl: step.nlgl,
            reg: step.reg,
            context: step.context,
        };
        observer(&record);
        curve.push(record);

        adam.begin_step();
        let (left, right) = emb.halves_mut();
        adam.update(
            &mut left_slot,
            left.as_slice_mut().expect("standard layout"),
            step.grad_left.as_slice().expect("standard layout"),
        );
        adam.update(
            &mut right_slot,
            right.as_slice_mut().expect("standard layout"),
            step.grad_right.as_slice().expect("standard layout"),
        );
        if let Some(grad) = &step.grad_logits {
            adam.update(&mut logit_slot, params.logits_mut(), grad);
        }
    }

    let mut report = objective.loss(&emb, &params).map_err(|err| match err {
        Error::NonFinite(_) => Error::Diverged {
            epoch: cfg.epochs,
            loss: f64::NAN,
        },
        other => other,
    })?;
    report.curve = curve;
    let distribution = match &objective.target {
        Target::Learned(_) => softmax_context(&params),
        Target::Fixed(_, q) => q.clone(),
    };
    Ok(TrainOutcome {
        embeddings: emb,
        context: params,
        distribution,
        report,
    })
}
