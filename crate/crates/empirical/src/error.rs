use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmpiricalError {
    /// The enumeration box exceeds the work guard.
    BoxGuard(String),
    /// A slope schedule or grid fails its preconditions.
    BadSchedule(String),
    /// Inputs are degenerate (zero form, empty tuple, …).
    DegenerateInput(String),
    /// Numeric rank detection was ambiguous at the working tolerance.
    RankAmbiguous(String),
}

impl fmt::Display for EmpiricalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmpiricalError::BoxGuard(m) => write!(f, "enumeration guard exceeded: {m}"),
            EmpiricalError::BadSchedule(m) => write!(f, "bad schedule: {m}"),
            EmpiricalError::DegenerateInput(m) => write!(f, "degenerate input: {m}"),
            EmpiricalError::RankAmbiguous(m) => write!(f, "rank tolerance ambiguity: {m}"),
        }
    }
}

impl std::error::Error for EmpiricalError {}
