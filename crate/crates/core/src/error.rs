use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("large-scale fading must be strictly positive (AP {ap}, UE {ue}: {value})")]
    NonPositiveGain { ap: usize, ue: usize, value: f64 },

    #[error("LSFD vector for UE {ue} has support outside its serving cluster (AP {ap})")]
    SupportViolation { ue: usize, ap: usize },

    #[error("degenerate channel statistics for UE {ue}: combiner system is not positive definite")]
    DegenerateStatistics { ue: usize },

    #[error("surrogate undefined: inner quadratic-transform value {inner} is negative for UE {ue}")]
    SurrogateDomain { ue: usize, inner: f64 },

    #[error("QoS constraints infeasible at full power for UEs {ues:?}")]
    InfeasibleQos { ues: Vec<usize> },

    #[error("power subproblem started outside the objective domain")]
    InfeasibleStart,

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
