use thiserror::Error;

/// Errors surfaced by construction, evaluation, integration, and diagnostics.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("conjugate unavailable for {function}: no closed form registered")]
    ConjugateUnavailable { function: String },

    #[error("invalid construction: {0}")]
    InvalidConstruction(String),

    #[error("growth constant k={k} must satisfy 0 <= k < gamma={gamma}")]
    GrowthConstantOutOfRange { k: f64, gamma: f64 },

    #[error("growth condition infeasible: k_min={k_min} >= gamma={gamma}")]
    GrowthInfeasible { k_min: f64, gamma: f64 },

    #[error("integration aborted at t={t}: {reason}")]
    IntegrationAborted { t: f64, reason: String },

    #[error("solution certificate failed ({certificate}): {detail}")]
    CertificationFailed { certificate: String, detail: String },

    #[error("point not certified in ran N: {0}")]
    NormalConeCertificateFailed(String),

    #[error("diagnostic input invalid: {0}")]
    InvalidDiagnosticInput(String),

    #[error("unknown problem '{0}' in registry")]
    UnknownProblem(String),

    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
