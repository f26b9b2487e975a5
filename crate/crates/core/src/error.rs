use thiserror::Error;

/// Every failure the library reports. The variants map one-to-one onto the
/// CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("cap exceeded: {what} (cap = {cap})")]
    Cap { what: String, cap: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn cap(what: impl Into<String>, cap: impl ToString) -> Self {
        Error::Cap { what: what.into(), cap: cap.to_string() }
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Cap { .. } => 3,
            Error::Invariant(_) => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(format!("malformed JSON: {e}"))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Input(format!("i/o: {e}"))
    }
}
