use std::fmt;

use sqg_core::SqgError;

/// Why a command did not succeed, and the matching exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or input data.
    Usage(String),
    /// A runtime guard stopped the computation.
    Guard(String),
    /// The computation finished and the checked inequality failed.
    Verdict(String),
    /// I/O and anything else.
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Guard(_) => 2,
            Failure::Verdict(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Guard(m) => write!(f, "aborted: {m}"),
            Failure::Verdict(m) => write!(f, "failed: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

pub fn guard_name(e: &SqgError) -> &'static str {
    match e {
        SqgError::OverflowGuard { guard, .. } => guard,
        SqgError::Cfl { .. } => "cfl",
        SqgError::NonFinite { .. } => "non_finite",
        SqgError::CostCap { .. } => "cost_cap",
        _ => "none",
    }
}

impl From<SqgError> for Failure {
    fn from(e: SqgError) -> Self {
        if e.is_guard() {
            return Failure::Guard(format!("guard {} tripped: {e}", guard_name(&e)));
        }
        match e {
            SqgError::Io(_) | SqgError::Json(_) | SqgError::Quadrature(_) | SqgError::InsufficientStates(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}
