use evcat::corpus::ParseError;
use evcat::features::FeatureError;
use evcat::harness::HarnessError;
use evcat::modelsearch::ModelError;
use thiserror::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Data(format!("malformed corpus: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::InvalidParameter(_)
            | FeatureError::UnknownOrganization(_)
            | FeatureError::ModeMismatch { .. } => CliError::Config(e.to_string()),
            FeatureError::Model(m) => m.into(),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::InfeasibleParams(_) => CliError::Config(e.to_string()),
            HarnessError::Invariant(_) => CliError::Invariant(e.to_string()),
            HarnessError::Feature(f) => f.into(),
            HarnessError::Model(m) => m.into(),
            _ => CliError::Data(e.to_string()),
        }
    }
}
