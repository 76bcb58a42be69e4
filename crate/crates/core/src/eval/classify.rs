use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::objective::EmbeddingPair;

/// Node labels over dense ids with disjoint train/validation/test sets.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledNodes {
    labels: Vec<Option<usize>>,
    num_classes: usize,
    train: Vec<usize>,
    validation: Vec<usize>,
    test: Vec<usize>,
}

impl LabeledNodes {
    pub fn new(
        labels: Vec<Option<usize>>,
        num_classes: usize,
        train: Vec<usize>,
        validation: Vec<usize>,
        test: Vec<usize>,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        if let Some(c) = labels.iter().flatten().find(|&&c| c >= num_classes) {
            return Err(Error::InvalidConfig(format!(
                "class {c} out of range for {num_classes} classes"
            )));
        }
        let mut seen = HashSet::new();
        for &u in train.iter().chain(&validation).chain(&test) {
            if u >= labels.len() {
                return Err(Error::NodeOutOfRange {
                    node: u,
                    num_nodes: labels.len(),
                });
            }
            if labels[u].is_none() {
                return Err(Error::InvalidConfig(format!(
                    "node {u} is in a split but has no label"
                )));
            }
            if !seen.insert(u) {
                return Err(Error::InvalidConfig(format!(
                    "node {u} appears in more than one split"
                )));
            }
        }
        Ok(LabeledNodes {
            labels,
            num_classes,
            train,
            validation,
            test,
        })
    }

    /// Seeded random split: `train_per_class` nodes of every class, then
    /// `num_validation` and `num_test` nodes drawn from the remainder (each
    /// capped by what is left).
    pub fn random_split(
        labels: Vec<Option<usize>>,
        num_classes: usize,
        train_per_class: usize,
        num_validation: usize,
        num_test: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labeled: Vec<usize> = (0..labels.len()).filter(|&u| labels[u].is_some()).collect();
        labeled.shuffle(&mut rng);
        let mut taken = vec![0usize; num_classes];
        let mut train = Vec::new();
        let mut rest = Vec::new();
        for u in labeled {
            let c = labels[u].expect("filtered to labeled nodes");
            if c < num_classes && taken[c] < train_per_class {
                taken[c] += 1;
                train.push(u);
            } else {
                rest.push(u);
            }
        }
        let nv = num_validation.min(rest.len());
        let validation: Vec<usize> = rest.drain(..nv).collect();
        let nt = num_test.min(rest.len());
        let test: Vec<usize> = rest.drain(..nt).collect();
        Self::new(labels, num_classes, train, validation, test)
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn train(&self) -> &[usize] {
        &self.train
    }

    pub fn validation(&self) -> &[usize] {
        &self.validation
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }
}

/// Parsed `node_id class_id` lines, with class ids mapped densely in
/// ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelFile {
    pub labels: Vec<Option<usize>>,
    pub num_classes: usize,
    pub class_ids: Vec<u64>,
}

pub fn parse_labels<R: BufRead>(reader: R, graph: &Graph) -> Result<LabelFile> {
    let index = graph.label_index();
    let mut raw = Vec::new();
    let mut unknown = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid integer {tok:?}"),
            })
        };
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected `node class`, found {} fields", tokens.len()),
            });
        }
        let (node, class) = (parse(tokens[0])?, parse(tokens[1])?);
        match index.get(&node) {
            Some(&u) => raw.push((u, class)),
            None => {
                unknown.insert(node);
            }
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownLabelNodes(unknown.into_iter().collect()));
    }
    let class_ids: Vec<u64> = raw
        .iter()
        .map(|&(_, c)| c)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut labels = vec![None; graph.num_nodes()];
    for (u, c) in raw {
        labels[u] = Some(class_ids.binary_search(&c).expect("collected above"));
    }
    Ok(LabelFile {
        labels,
        num_classes: class_ids.len(),
        class_ids,
    })
}

/// Predicts every node's class as the argmax of `exp(α S) · L_train`,
/// where `S = L Rᵀ` restricted to training columns. Ties go to the lowest
/// class index.
pub fn smooth_knn_classify(
    emb: &EmbeddingPair,
    labels: &LabeledNodes,
    alpha: f64,
) -> Result<Vec<usize>> {
    if labels.train.is_empty() {
        return Err(Error::NoTrainingLabels);
    }
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if emb.num_nodes() != labels.labels.len() {
        return Err(Error::DimensionMismatch {
            context: "labels vs embeddings",
            expected: emb.num_nodes().to_string(),
            found: labels.labels.len().to_string(),
        });
    }
    let train_class: Vec<usize> = labels
        .train
        .iter()
        .map(|&t| labels.labels[t].expect("validated"))
        .collect();
    let mut logits = vec![0.0; labels.train.len()];
    let mut votes = vec![0.0; labels.num_classes];
    let mut out = Vec::with_capacity(emb.num_nodes());
    for u in 0..emb.num_nodes() {
        for (slot, &t) in logits.iter_mut().zip(&labels.train) {
            *slot = alpha * emb.score(u, t);
        }
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        votes.fill(0.0);
        for (&z, &c) in logits.iter().zip(&train_class) {
            votes[c] += (z - max).exp();
        }
        let mut best = 0;
        for c in 1..votes.len() {
            if votes[c] > votes[best] {
                best = c;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Fraction of `nodes` whose prediction matches the label.
pub fn accuracy(predictions: &[usize], labels: &LabeledNodes, nodes: &[usize]) -> f64 {
    if nodes.is_empty() {
        return 0.0;
    }
    let hits = nodes
        .iter()
        .filter(|&&u| labels.labels[u] == Some(predictions[u]))
        .count();
    hits as f64 / nodes.len() as f64
}

/// Grid value with the best validation accuracy; ties go to the smallest α.
pub fn select_alpha(emb: &EmbeddingPair, labels: &LabeledNodes, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if labels.validation.is_empty() {
        return Err(Error::EmptyValidation);
    }
    let mut best: Option<(f64, f64)> = None;
    for &alpha in grid {
        let preds = smooth_knn_classify(emb, labels, alpha)?;
        let acc = accuracy(&preds, labels, &labels.validation);
        best = match best {
            Some((a, b)) if acc < b || (acc == b && alpha >= a) => Some((a, b)),
            _ => Some((alpha, acc)),
        };
    }
    Ok(best.expect("grid non-empty").0)
}
