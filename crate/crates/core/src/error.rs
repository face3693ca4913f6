use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A linear system was singular or too ill-conditioned to trust.
    ///
    /// `unlabeled_indices` lists zero-based unlabeled positions (offsets into
    /// the unlabeled block) that have no path to any labeled point, when such
    /// points could be identified.
    #[error("singular system in {context}{}", describe_indices(.unlabeled_indices))]
    Singular {
        context: String,
        unlabeled_indices: Vec<usize>,
    },

    #[error(
        "fixed-point iteration did not converge after {iterations} iterations (last change {last_change:e})"
    )]
    NonConvergence {
        iterations: usize,
        last_change: f64,
        last_iterate: Vec<f64>,
    },

    /// Every kernel weight between the query and the labeled points underflowed.
    #[error("empty kernel neighborhood{}", .index.map(|i| format!(" at unlabeled point {i}")).unwrap_or_default())]
    EmptyNeighborhood { index: Option<usize> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn singular(context: impl Into<String>) -> Self {
        Error::Singular {
            context: context.into(),
            unlabeled_indices: Vec::new(),
        }
    }

    /// True for failures caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::NonConvergence { .. } | Error::EmptyNeighborhood { .. }
        )
    }
}

fn describe_indices(indices: &[usize]) -> String {
    if indices.is_empty() {
        String::new()
    } else {
        format!(
            " (unlabeled points {:?} are disconnected from every labeled point)",
            indices
        )
    }
}
