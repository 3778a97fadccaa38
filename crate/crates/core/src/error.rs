use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiracError {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid grid configuration: {0}")]
    Config(String),

    #[error("field is in {found} representation, expected {expected}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("projector is singular at zero energy (m = 0, p = 0)")]
    SingularProjector,

    #[error("kick schedule error: {0}")]
    Schedule(String),

    #[error("dense operator of size {size} exceeds the cap of {cap}")]
    Size { size: usize, cap: usize },

    #[error("seed is not an eigenpair: residual {residual:e}")]
    NotEigenpair { residual: f64 },

    #[error("operation requires ndim = {required}, grid has {found}")]
    UnsupportedDimension { required: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate propagator: {0}")]
    Degenerate(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DiracError>;
