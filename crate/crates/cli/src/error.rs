//! CLI error wrapper and the exit-code table.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Io(std::io::Error),
    /// Malformed problem file (not valid JSON).
    Parse(serde_json::Error),
    /// Well-formed file with missing or invalid fields, or bad option
    /// values.
    Schema(String),
    Core(paretax::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "i/o: {e}"),
            CliError::Parse(e) => write!(f, "parse: {e}"),
            CliError::Schema(msg) => write!(f, "schema: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<paretax::Error> for CliError {
    fn from(e: paretax::Error) -> Self {
        CliError::Core(e)
    }
}

/// Maps every error family to a distinct documented exit code. Code 2 is
/// reserved for command-line usage errors (clap's default).
pub fn exit_code(err: &CliError) -> i32 {
    use paretax::Error as E;
    match err {
        CliError::Io(_) => 1,
        CliError::Parse(_) => 3,
        CliError::Schema(_) => 4,
        CliError::Core(core) => match core {
            E::DimensionMismatch { .. } => 5,
            E::ZeroVector { .. } => 6,
            E::InfeasibleTarget { .. } => 7,
            E::InvalidSampleCount(_) => 8,
            E::InfeasibleBudget { .. } => 9,
            E::ConstraintNotInSubspace { .. } => 10,
            E::NotSpd(_) => 11,
            E::DegenerateProjection { .. } => 12,
            E::SpecInfeasible(_) => 13,
            E::EmptyPairSet => 14,
            E::NotSuperposed { .. } => 15,
            E::NearOrthogonalityViolated { .. } => 16,
            E::InsufficientSeries(_) => 17,
            E::InvalidResolution(_) => 18,
            E::EmptyInput(_) => 19,
            E::IndexOutOfRange { .. } => 20,
            E::InvalidBudgetRadius(_) => 21,
        },
    }
}
