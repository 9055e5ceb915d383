//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, MaserError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaserError {
    /// A parameter or input is outside its admissible range.
    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    /// Probability would leak past the Fock-space cutoff; results at this
    /// truncation are not trustworthy.
    #[error("truncation overflow at n_max = {n_max}: {detail}")]
    TruncationOverflow { n_max: usize, detail: String },

    /// The integrator hit its step ceiling before reaching the target time.
    #[error("no convergence within {max_steps} steps (reached t = {reached:.6e} of {target:.6e})")]
    NonConvergence {
        max_steps: u64,
        reached: f64,
        target: f64,
    },
}

impl MaserError {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        MaserError::Domain {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn truncation(n_max: usize, detail: impl Into<String>) -> Self {
        MaserError::TruncationOverflow {
            n_max,
            detail: detail.into(),
        }
    }
}
