pub mod eval;
pub mod figure;
pub mod identities;
pub mod ode;
pub mod spectrum;

use crate::CliError;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ScalarMode {
    Float,
    Exact,
}

pub fn parse_mode(text: &str) -> Result<ScalarMode, CliError> {
    match text {
        "float" => Ok(ScalarMode::Float),
        "exact" => Ok(ScalarMode::Exact),
        other => Err(CliError::usage(format!("mode must be float or exact, got '{other}'"))),
    }
}

pub fn parse_format(text: &str) -> Result<OutputFormat, CliError> {
    match text {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::usage(format!("format must be csv or json, got '{other}'"))),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}
