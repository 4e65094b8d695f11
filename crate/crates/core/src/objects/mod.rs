//! States, channels and the coherence-free channel classes.

mod channel;
mod class;
mod spec;
mod state;

pub use channel::{kraus_to_choi, choi_to_kraus, LinearMap, QuantumChannel, CHANNEL_TOL};
pub use class::{
    is_dio, is_io_kraus, is_mio, is_sio_kraus, AffineConstraint, ClassTag, FreeChannelClass,
    MEMBERSHIP_TOL,
};
pub use spec::{ChannelSpec, Representation};
pub use state::{DensityMatrix, STATE_TOL};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectError {
    /// A named invariant of the object failed validation.
    #[error("invariant `{invariant}` violated: {detail}")]
    Invalid {
        invariant: &'static str,
        detail: String,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("malformed channel spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl ObjectError {
    pub(crate) fn invalid(invariant: &'static str, detail: impl Into<String>) -> Self {
        Self::Invalid {
            invariant,
            detail: detail.into(),
        }
    }

    /// Name of the failed invariant, when the error carries one.
    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            Self::Invalid { invariant, .. } => Some(invariant),
            Self::NotPsd { .. } => Some("choi_psd"),
            Self::DimensionMismatch { .. } => Some("dimension"),
            _ => None,
        }
    }
}
