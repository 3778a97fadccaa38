use dirac_core::DiracError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },
    #[error(transparent)]
    Core(#[from] DiracError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("selftest: {0} check(s) failed")]
    SelftestFailed(usize),
}

impl CliError {
    pub fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        CliError::Config { line, msg: msg.into() }
    }

    /// Process exit status: 2 for configuration problems, 3 for selftest
    /// failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Core(DiracError::Config(_) | DiracError::Schedule(_) | DiracError::UnsupportedDimension { .. }) => 2,
            CliError::SelftestFailed(_) => 3,
            _ => 1,
        }
    }
}
