//! Command implementations behind the `mgp` binary: model files (TOML),
//! sample CSV IO with the `-inf` token for off-support coordinates, a
//! threaded batch driver with worker-count-independent output, and the
//! validate / simulate / density / report commands.

pub mod commands;
pub mod model_file;
pub mod parallel;
pub mod points_io;

use mgp_core::{EvalError, SimError, ValidationError};

/// Command failure with a stable exit-code mapping:
/// 1 = parse / IO, 2 = model validation, 3 = runtime (simulation,
/// quadrature, tolerance), 4 = report checks failed.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("validation error: {0}")]
    Validation(#[from] ValidationError),
    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),
    #[error("simulation error: {0}")]
    Sim(#[from] SimError),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Eval(_) | CliError::Sim(_) => 3,
            CliError::ChecksFailed { .. } => 4,
        }
    }
}

/// Shortest round-trip decimal form of a float (Rust's `Display`),
/// with `-inf` spelled as the literal token.
pub fn format_float(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Inverse of [`format_float`].
pub fn parse_float(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if t == "-inf" {
        return Ok(f64::NEG_INFINITY);
    }
    t.parse::<f64>()
        .map_err(|e| CliError::Parse(format!("bad float {t:?}: {e}")))
}

/// Newline discipline for all emitted text files: LF only.
pub const LINE_ENDING: &str = "\n";
