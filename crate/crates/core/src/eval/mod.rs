//! Link-prediction and node-classification evaluation.

mod classify;
mod metrics;
mod split;

pub use classify::{
    accuracy, parse_labels, select_alpha, smooth_knn_classify, LabelFile, LabeledNodes,
};
pub use metrics::{link_prediction_eval, pair_score, roc_auc, Metrics};
pub use split::{split_edges, LinkSplit};
