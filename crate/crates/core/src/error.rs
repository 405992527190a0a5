use std::path::PathBuf;

use crate::types::{NodeId, SimTime};

/// Errors raised while loading inputs or validating a scenario.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("contact events out of order at index {index} (t={time})")]
    Unordered { index: usize, time: SimTime },
    #[error("invalid contact pairing for {a}-{b} at t={time}: {reason}")]
    Pairing {
        a: NodeId,
        b: NodeId,
        time: SimTime,
        reason: &'static str,
    },
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("workload invalid at entry {index}: {reason}")]
    Workload { index: usize, reason: String },
    #[error("config: {key}: {reason}")]
    Config { key: String, reason: String },
    #[error("nothing to emit: aggregate is empty")]
    EmptyAggregate,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
