use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("tolerance unreachable: {0}")]
    Tolerance(String),
    #[error("statistical check failed: {0}")]
    Statistical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Statistical(_) => 5,
        }
    }
}

impl From<casimir_core::spectrum::SpectrumError> for CliError {
    fn from(e: casimir_core::spectrum::SpectrumError) -> Self {
        use casimir_core::spectrum::SpectrumError as E;
        match e {
            E::NonConvergent { .. } | E::NotPositiveDefinite { .. } => CliError::Tolerance(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<casimir_core::force::ForceError> for CliError {
    fn from(e: casimir_core::force::ForceError) -> Self {
        use casimir_core::force::ForceError as E;
        match e {
            E::ToleranceUnreachable { .. } => CliError::Tolerance(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<casimir_core::sampler::SamplerError> for CliError {
    fn from(e: casimir_core::sampler::SamplerError) -> Self {
        CliError::Config(e.to_string())
    }
}
