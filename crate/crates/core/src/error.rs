use std::path::PathBuf;

use crate::params::ValidationReport;

/// Errors raised by the solvers and loaders.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid parameters: {0}")]
    Invalid(ValidationReport),

    #[error("invalid solver settings: {0}")]
    Settings(String),

    /// Retail price at or above the demand-zero price α/(β − λθ).
    #[error("infeasible retail price {price} (must be below {ceiling})")]
    InfeasiblePrice { price: f64, ceiling: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("shipment search exhausted: profit still increasing at n = {max_n}")]
    SearchExhausted { max_n: u32 },

    #[error("coordination infeasible: mu_upper {upper} < mu_lower {lower}")]
    InfeasibleContract { lower: f64, upper: f64 },

    #[error("simulation needs at least 16 steps per cycle, got {0}")]
    StepResolution(usize),
}

impl Error {
    /// True for errors caused by the inputs rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Parse { .. } | Error::Invalid(_) | Error::Settings(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
