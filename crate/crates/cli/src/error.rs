use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid, missing or unreadable configuration.
    #[error("{0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: aerial_d2d::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn numeric(context: impl Into<String>, source: aerial_d2d::Error) -> Self {
        match source {
            aerial_d2d::Error::Domain(msg) => Self::Config(format!("{}: {msg}", context.into())),
            source => Self::Numeric { context: context.into(), source },
        }
    }

    /// 2 for configuration errors, 3 for quadrature convergence failures,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric { source: aerial_d2d::Error::Convergence { .. }, .. } => 3,
            _ => 1,
        }
    }
}
