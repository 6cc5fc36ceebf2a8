use thiserror::Error;

/// Errors produced by channel construction, validation, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("matrix is not Hermitian: max asymmetry {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not unitary: max deviation from U\u{2020}U = I is {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized: norm {norm} differs from 1 by more than {tol:.3e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("basis contains no vectors")]
    EmptyBasis,

    #[error("basis vector {index} is linearly dependent on the preceding ones")]
    LinearlyDependent { index: usize },

    #[error("channel has no Kraus operators")]
    EmptyKraus,

    #[error("Kraus operator {index} is {rows}x{cols}, expected {dim}x{dim}")]
    KrausShape {
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },

    #[error("channel is not trace preserving: max deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotTracePreserving { deviation: f64, tol: f64 },

    #[error("probabilities must sum to 1 within 1e-9: sum is {sum}")]
    ProbabilitySum { sum: f64 },

    #[error("probability {value} at index {index} is negative")]
    NegativeProbability { index: usize, value: f64 },

    #[error("invalid projector family: {detail} (deviation {deviation:.3e})")]
    ProjectorFamily { detail: String, deviation: f64 },

    #[error("{context}: expected a {expected} Hamiltonian, got {got}")]
    HamiltonianKindMismatch {
        context: &'static str,
        expected: &'static str,
        got: &'static str,
    },

    #[error("{what}: two computation routes disagree by {deviation:.3e} (tolerance {tol:.3e})")]
    RouteDisagreement {
        what: &'static str,
        deviation: f64,
        tol: f64,
    },

    #[error("error-correction condition violated: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    CodeCondition { residual: f64, tol: f64 },

    #[error("optimizer configuration invalid: {detail}")]
    BadOptimizerConfig { detail: String },

    #[error("grid oracle requires a 2-dimensional base space, got dimension {dim}")]
    GridDimension { dim: usize },

    #[error("Monte-Carlo average requires at least 2 samples, got {got}")]
    TooFewSamples { got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
