use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("singular weight at j={j}: {detail}")]
    SingularWeight { j: i64, detail: String },
    #[error("step budget of {budget} exceeded; stuck element: {stuck}")]
    Budget { budget: u64, stuck: String },
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } | Error::Tolerance(_) => 3,
            Error::Parse(_) => 64,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
