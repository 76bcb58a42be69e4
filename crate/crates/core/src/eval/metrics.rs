use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::eval::LinkSplit;
use crate::objective::EmbeddingPair;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roc_auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    pub metadata: BTreeMap<String, Value>,
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half (Mann-Whitney U over midranks).
pub fn roc_auc(positive: &[f64], negative: &[f64]) -> Result<f64> {
    if positive.is_empty() {
        return Err(Error::EmptyScores("positive"));
    }
    if negative.is_empty() {
        return Err(Error::EmptyScores("negative"));
    }
    if positive.iter().chain(negative).any(|x| x.is_nan()) {
        return Err(Error::NonFinite("scores"));
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks i+1..=j share their mean
        let mid = (i + 1 + j) as f64 / 2.0;
        let pos_in_block = all[i..j].iter().filter(|x| x.1).count();
        rank_sum += mid * pos_in_block as f64;
        i = j;
    }
    let np = positive.len() as f64;
    let nn = negative.len() as f64;
    Ok((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

/// `L_u · R_v`, averaged with `L_v · R_u` for undirected graphs.
pub fn pair_score(emb: &EmbeddingPair, u: usize, v: usize, directed: bool) -> f64 {
    if directed {
        emb.score(u, v)
    } else {
        0.5 * (emb.score(u, v) + emb.score(v, u))
    }
}

fn scores(emb: &EmbeddingPair, pairs: &[(usize, usize)], directed: bool) -> Result<Vec<f64>> {
    let n = emb.num_nodes();
    pairs
        .iter()
        .map(|&(u, v)| {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, num_nodes: n });
                }
            }
            Ok(pair_score(emb, u, v, directed))
        })
        .collect()
}

/// Test ROC-AUC of the embedding's pair scores; the training-pair AUC is
/// recorded in the metadata when both training lists are non-empty.
pub fn link_prediction_eval(emb: &EmbeddingPair, split: &LinkSplit) -> Result<Metrics> {
    let directed = split.train_graph.is_directed();
    let pos = scores(emb, &split.test_pos, directed)?;
    let neg = scores(emb, &split.test_neg, directed)?;
    let auc = roc_auc(&pos, &neg)?;

    let mut metadata = BTreeMap::new();
    metadata.insert("split_seed".into(), Value::from(split.seed));
    metadata.insert("fraction".into(), Value::from(split.fraction));
    metadata.insert(
        "achieved_fraction".into(),
        Value::from(split.achieved_fraction),
    );
    metadata.insert("num_test_pos".into(), Value::from(pos.len()));
    metadata.insert("num_test_neg".into(), Value::from(neg.len()));
    metadata.insert("symmetrized".into(), Value::from(!directed));
    if !split.train_pos.is_empty() && !split.train_neg.is_empty() {
        let tp = scores(emb, &split.train_pos, directed)?;
        let tn = scores(emb, &split.train_neg, directed)?;
        metadata.insert("train_roc_auc".into(), Value::from(roc_auc(&tp, &tn)?));
    }
    Ok(Metrics {
        roc_auc: Some(auc),
        accuracy: None,
        metadata,
    })
}
