use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The input is not well-formed JSON.
    #[error("malformed input: {message}")]
    MalformedInput { message: String },

    /// A field is missing or has the wrong type.
    #[error("{path}: {message}")]
    SchemaViolation { path: String, message: String },

    /// The document is well-typed but breaks a telemetry invariant.
    #[error("{path}: {message}")]
    InvariantViolation { path: String, message: String },

    #[error("unknown player `{0}`")]
    UnknownPlayer(String),

    #[error("player `{0}` has no position samples")]
    NoSamples(String),

    #[error("bad window [{t0}, {t1}]: {reason}")]
    BadWindow { t0: f64, t1: f64, reason: String },

    #[error("time {t} outside [0, {duration_s}]")]
    BadTime { t: f64, duration_s: f64 },

    #[error("point ({x}, {y}) outside the unit map square")]
    OutOfBounds { x: f64, y: f64 },

    #[error("template references unknown evidence key `{0}`")]
    MissingEvidenceKey(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvariantViolation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Offending document path, when the error carries one.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::SchemaViolation { path, .. } | Error::InvariantViolation { path, .. } => {
                Some(path)
            }
            _ => None,
        }
    }

    /// Stable machine-readable code, used in service error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedInput { .. } => "malformed_input",
            Error::SchemaViolation { .. } => "schema_violation",
            Error::InvariantViolation { .. } => "invariant_violation",
            Error::UnknownPlayer(_) => "unknown_player",
            Error::NoSamples(_) => "no_samples",
            Error::BadWindow { .. } => "bad_window",
            Error::BadTime { .. } => "bad_time",
            Error::OutOfBounds { .. } => "out_of_bounds",
            Error::MissingEvidenceKey(_) => "missing_evidence_key",
            Error::InvalidConfig(_) => "invalid_config",
        }
    }
}
