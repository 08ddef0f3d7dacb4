use thiserror::Error;

use crate::polyring::MultiPoly;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the admissible domain (bad K/L, unknown node, non-square matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("exact division failed, nonzero remainder {remainder}")]
    NotDivisible { remainder: MultiPoly },

    /// The reflection basis left nonzero entries outside the two diagonal blocks.
    #[error("parity basis did not block-diagonalize the Hamiltonian ({} off-block entries)", offending.len())]
    NotBlockDiagonal {
        offending: Vec<(usize, usize, MultiPoly)>,
    },

    #[error("residual certification failed: worst residual {worst:e} exceeds {tol:e}")]
    Residual { worst: f64, tol: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("invalid bracket [{lo}, {hi}]: all_real is {real_lo} at lo and {real_hi} at hi")]
    Bracket {
        lo: f64,
        hi: f64,
        real_lo: bool,
        real_hi: bool,
    },

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
