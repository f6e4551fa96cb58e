use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument outside the domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("quadrature did not reach the requested tolerance: estimated error {achieved:.3e}, target {target:.3e}, {panels} panels")]
    Quadrature { achieved: f64, target: f64, panels: usize },

    #[error("{op}: logarithm branch cannot be tracked ({detail})")]
    Branch { op: &'static str, detail: String },

    #[error("{op}: no root in bracket [{lo:.6e}, {hi:.6e}]")]
    NoRoot { op: &'static str, lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn branch(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Branch { op, detail: detail.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
