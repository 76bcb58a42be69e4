//! Node embeddings learned by factorizing the expected random-walk
//! co-occurrence matrix, with the context distribution over walk distances
//! trained jointly through a softmax over transition-matrix powers.
//!
//! The pipeline is: [`parse_edge_list`] → [`transition_matrix`] →
//! [`train`] (which repeatedly evaluates [`expected_cooccurrence`] under the
//! current attention weights) → [`eval`] for link prediction or
//! classification. [`simulate_walks`] provides a Monte-Carlo check of the
//! closed-form expectation.

pub mod error;
pub mod eval;
pub mod expectation;
pub mod generators;
pub mod graph;
pub mod io;
pub mod objective;
pub mod optim;
mod par;
pub mod train;
pub mod walk;

pub use error::{Error, Result};
pub use expectation::{
    deepwalk_coefficients, expected_cooccurrence, glove_coefficients, per_power_contraction,
    softmax_context, ContextDistribution, ContextParams, CooccurrenceMatrix, TransitionPowers,
};
pub use graph::{parse_edge_list, transition_matrix, BuildReport, Graph, TransitionMatrix};
pub use objective::{
    gradients, nlgl_loss, score_matrix, EmbeddingPair, EpochRecord, Gradients, LossReport,
};
pub use train::{train, train_with, ContextMode, Optimizer, TrainConfig, TrainOutcome};
pub use walk::{empirical_vs_expected_report, simulate_walks, OracleReport, WalkConfig};
