use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no edges")]
    EmptyEdgeSet,

    #[error("node {node} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("graph is disconnected ({components} connected components)")]
    Disconnected { components: usize },

    #[error("score list is empty ({0})")]
    EmptyScores(&'static str),

    #[error("no labeled training nodes")]
    NoTrainingLabels,

    #[error("alpha grid is empty")]
    EmptyGrid,

    #[error("validation set is empty")]
    EmptyValidation,

    #[error("labels reference nodes absent from the graph: {0:?}")]
    UnknownLabelNodes(Vec<u64>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
