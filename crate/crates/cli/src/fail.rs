//! Failures with the pipeline stage they came from and the exit code they map to.

use std::fmt;

use jqnn_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Target,
    Approximation,
    Compile,
    Simulation,
    Output,
    Verify,
    Guard,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Target => "target function",
            Stage::Approximation => "trigonometric approximation",
            Stage::Compile => "circuit compilation",
            Stage::Simulation => "circuit simulation",
            Stage::Output => "output",
            Stage::Verify => "verify",
            Stage::Guard => "resource guard",
        })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub stage: Stage,
    code: u8,
    message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { stage: Stage::Config, code: 1, message: message.into() }
    }

    pub fn output(message: impl Into<String>) -> Self {
        CliError { stage: Stage::Output, code: 1, message: message.into() }
    }

    /// A resource guard refused the run.
    pub fn guard(message: impl Into<String>) -> Self {
        CliError { stage: Stage::Guard, code: 3, message: message.into() }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        CliError { stage: Stage::Verify, code: 1, message: message.into() }
    }

    /// Wraps a library error. Compile failures exit 2 and resource guards 3
    /// whatever stage they surface in.
    pub fn new(stage: Stage, e: Error) -> Self {
        let (stage, code) = match e {
            Error::CompileFailed { .. } | Error::NotBounded { .. } => (Stage::Compile, 2),
            Error::TooLarge { .. } | Error::DegreeTooLarge { .. } | Error::Overflow { .. } => (stage, 3),
            Error::InvalidInput(_) | Error::DimensionMismatch(_) | Error::Format(_) => (stage, 1),
        };
        CliError { stage, code, message: e.to_string() }
    }

    pub fn code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}
