use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch for {what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("non-finite input sample at index {index}")]
    NonFiniteInput { index: usize },
    #[error("state became non-finite at sample {index}")]
    NonFiniteState { index: usize },
    #[error("filter has no taps")]
    EmptyFilter,
    #[error("invalid filter order {order}: {reason}")]
    InvalidOrder { order: usize, reason: &'static str },
    #[error("invalid rate ratio {p}/{q}")]
    InvalidRatio { p: i64, q: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("minimax solver did not converge (gap {gap:e}, newton decrement {decrement:e})")]
    SolverNoConvergence { gap: f64, decrement: f64 },
    #[error("eigenvalue iteration did not converge for a {size}x{size} matrix")]
    EigenNoConvergence { size: usize },
    #[error("zero-input trajectory diverged at sample {index}")]
    Diverged { index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("signal of {len} samples is too short for truncation of {truncate}")]
    TooShort { len: usize, truncate: usize },
    #[error("reference signal has zero energy")]
    ZeroReference,
}
