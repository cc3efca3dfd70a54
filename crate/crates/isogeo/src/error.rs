use thiserror::Error;

/// Failure modes for construction, validation, and geometry operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spectrum entries must be non-increasing (entry {index} rises by {rise:.3e})")]
    NotDecreasing { index: usize, rise: f64 },

    #[error("spectrum entries must be strictly positive (entry {index} = {value:.3e})")]
    NotPositive { index: usize, value: f64 },

    #[error("trace must equal one (got {trace:.12e})")]
    TraceNotOne { trace: f64 },

    #[error("ambient dimension {n} is smaller than the rank {k}")]
    DimensionTooSmall { n: usize, k: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not anti-Hermitian (residual {residual:.3e})")]
    NotAntiHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eig:.3e})")]
    NotPSD { min_eig: f64 },

    #[error("rank mismatch (expected {expected}, found {found})")]
    RankMismatch { expected: usize, found: usize },

    #[error("operands carry different spectra (deviation {deviation:.3e})")]
    SpectrumMismatch { deviation: f64 },

    #[error("operands are attached to different base points (deviation {deviation:.3e})")]
    BaseMismatch { deviation: f64 },

    #[error("shape mismatch (expected {expected_rows}x{expected_cols}, got {rows}x{cols})")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix does not satisfy the tangency condition (residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("matrix does not commute with the rank projector (residual {residual:.3e})")]
    NotBlockDiagonal { residual: f64 },

    #[error("integration step {dt:.3e} exceeds the stability threshold {max:.3e}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("curve start does not project onto the requested fiber (residual {residual:.3e})")]
    FiberMismatch { residual: f64 },

    #[error("frame does not sit in the requested fiber (residual {residual:.3e})")]
    FiberViolation { residual: f64 },

    #[error("states are not distinguishable (overlap {overlap:.3e})")]
    NotDistinguishable { overlap: f64 },

    #[error("sample grids disagree (times or counts differ by {deviation:.3e})")]
    GridMismatch { deviation: f64 },

    #[error("operation does not apply here: {reason}")]
    NotApplicable { reason: String },

    #[error("matrix is numerically singular (smallest singular value {sv:.3e})")]
    NotInvertible { sv: f64 },

    #[error("matrix does not have full column rank (smallest singular value {sv:.3e})")]
    NotFullRank { sv: f64 },

    #[error("state is singular where an invertible one is required (smallest eigenvalue {min_eig:.3e})")]
    SingularState { min_eig: f64 },

    #[error("invalid spectrum parameters: {reason}")]
    InvalidSpectrum { reason: String },

    #[error("variance radicand is negative beyond roundoff ({radicand:.3e})")]
    NegativeRadicand { radicand: f64 },

    #[error("file not found: {path}")]
    FileNotFound { path: String },

    #[error("cannot parse {path}: {reason}")]
    ParseError { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
