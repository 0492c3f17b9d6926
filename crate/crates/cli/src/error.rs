use vanvleck_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("degenerate operator: {0}")]
    DegenerateOperator(String),
    #[error("Fuchs index {0} is negative; run `vanvleck transform-infinity` to pass to y = 1/z")]
    NegativeFuchsIndex(i64),
    #[error("Fuchs index {0} is already non-negative; nothing to transform")]
    AlreadyNonNegative(i64),
    #[error("pairs file was computed for operator {found}, not {expected}")]
    DigestMismatch { expected: String, found: String },
    #[error("{failed} check(s) failed")]
    VerificationFailed { failed: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit status contract: 0 success, 1 failed verification or other error,
/// 2 resonance, 3 unsupported Fuchs index, 4 unusable input.
pub fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Parse { .. }
        | CliError::DegenerateOperator(_)
        | CliError::NegativeFuchsIndex(_)
        | CliError::AlreadyNonNegative(_)
        | CliError::DigestMismatch { .. } => 4,
        CliError::Core(c) => core_code(c),
        CliError::VerificationFailed { .. } | CliError::Io { .. } => 1,
    }
}

fn core_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Resonance { .. } => 2,
        CoreError::UnsupportedFuchsIndex(_) => 3,
        CoreError::NegativeFuchsIndex(_) | CoreError::Degenerate { .. } => 4,
        CoreError::Level { source, .. } => core_code(source),
        _ => 1,
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
