use std::fmt;

use thiserror::Error;

use crate::process::Pid;
use crate::SimTime;

/// One diagnostic produced while parsing or validating a scenario.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LineError {
    /// 1-based line number in the scenario text, or 0 when the problem is
    /// not attached to a particular line.
    pub line: usize,
    pub message: String,
}

impl LineError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid scenario: {}", join_lines(.0))]
    Scenario(Vec<LineError>),

    #[error("time {requested} is outside 0..={max_time}")]
    OutOfRange { requested: i64, max_time: SimTime },

    #[error("duration must be positive")]
    NonPositiveDuration,

    #[error("pid {0} is already present in the process table")]
    DuplicatePid(Pid),

    #[error("inconsistent trace: {0}")]
    InconsistentTrace(String),
}

fn join_lines(errors: &[LineError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
