use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("attitude {0} is outside [0, 1]")]
    AttitudeOutOfRange(f64),
    #[error("node {0} does not exist")]
    MissingNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("close tie {0} -> {1} has no underlying base tie")]
    MissingBaseTie(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("attachment distribution is degenerate: total degree is zero")]
    DegenerateDistribution,
    #[error("close layer already populated ({0} close ties)")]
    CloseLayerPopulated(usize),
    #[error("network has no base ties")]
    NoBaseTies,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid mechanism parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    Syntax {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum NetworkIoError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: {source}")]
    Invariant {
        path: PathBuf,
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Export(#[from] NetworkIoError),
    #[error("output {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
