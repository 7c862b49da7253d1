use hoibc::analysis::AnalysisError;
use hoibc::assembly::AssemblyError;
use hoibc::impedance::ImpedanceError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("comparison failed: {0}")]
    ComparisonFailed(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::ComparisonFailed(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(vec![msg.into()])
    }
}

impl From<ImpedanceError> for CliError {
    fn from(e: ImpedanceError) -> Self {
        match e {
            ImpedanceError::InvalidCoating(_) | ImpedanceError::Usage(_) => CliError::validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AssemblyError> for CliError {
    fn from(e: AssemblyError) -> Self {
        match e {
            AssemblyError::Resolution { .. } | AssemblyError::Usage(_) => CliError::validation(e.to_string()),
            AssemblyError::Impedance(i) => i.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Usage(_) | AnalysisError::GridMismatch(_) | AnalysisError::Parse(_) | AnalysisError::Geometry(_) => {
                CliError::validation(e.to_string())
            }
            AnalysisError::Assembly(a) => a.into(),
            AnalysisError::Impedance(i) => i.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
