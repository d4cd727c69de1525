use thiserror::Error;

/// Errors raised by the closed-form layers and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("noise photon number must be positive; N_n = 0 is the identity channel")]
    ZeroNoise,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unphysical input: {0}")]
    Physicality(String),

    #[error("finite-difference step does not fit inside the x-domain: {0}")]
    StepSize(String),

    #[error("cutoff {cutoff} too small ({reason}); suggested cutoff {suggested}")]
    Cutoff {
        cutoff: usize,
        suggested: usize,
        reason: String,
    },

    #[error("quadrature not converged: {0}")]
    Convergence(String),

    #[error("perturbation strength {epsilon} exceeds admissible bound {max_admissible}")]
    EpsilonTooLarge { epsilon: f64, max_admissible: f64 },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("inconsistent constructions: {0}")]
    Inconsistency(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
