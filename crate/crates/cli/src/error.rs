use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

use wenxian_core::Error as CoreError;

/// Every failure a job can report, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("input not found: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("{} already exists; pass --force to overwrite", .0.display())]
    OutputExists(PathBuf),

    #[error("{0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MISSING_INPUT: u8 = 3;
pub const EXIT_SCHEMA: u8 = 4;
pub const EXIT_INVALID_ARGUMENT: u8 = 5;
pub const EXIT_OUTPUT_EXISTS: u8 = 6;
pub const EXIT_STALE_GENERATION: u8 = 7;
pub const EXIT_CONFIG: u8 = 8;

/// Machine-readable kind of a core error, shared by the CLI and the service.
pub fn core_kind(e: &CoreError) -> &'static str {
    match e {
        CoreError::InvalidEncoding { .. } => "invalid_encoding",
        CoreError::OverlappingChapters { .. } => "overlapping_chapters",
        CoreError::UnknownDocument(_) => "unknown_document",
        CoreError::DuplicateDocument(_) => "duplicate_document",
        CoreError::InvalidArgument(_) => "invalid_argument",
        CoreError::InvalidDate(_) => "invalid_date",
        CoreError::Schema(_) | CoreError::Json(_) | CoreError::Csv(_) => "schema",
        CoreError::StaleGeneration { .. } => "stale_generation",
        CoreError::DegenerateTraining(_) => "degenerate_training",
        CoreError::Regex(_) => "invalid_pattern",
        CoreError::Io(e) if e.kind() == std::io::ErrorKind::NotFound => "missing_input",
        CoreError::Io(_) => "io",
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => core_kind(e),
            CliError::MissingInput(_) => "missing_input",
            CliError::OutputExists(_) => "output_exists",
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io(e) if e.kind() == std::io::ErrorKind::NotFound => "missing_input",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "usage" => EXIT_USAGE,
            "missing_input" => EXIT_MISSING_INPUT,
            "invalid_encoding" | "overlapping_chapters" | "duplicate_document" | "invalid_date" | "schema" => EXIT_SCHEMA,
            "unknown_document" | "invalid_argument" | "degenerate_training" | "invalid_pattern" => EXIT_INVALID_ARGUMENT,
            "output_exists" => EXIT_OUTPUT_EXISTS,
            "stale_generation" => EXIT_STALE_GENERATION,
            "config" => EXIT_CONFIG,
            _ => EXIT_INTERNAL,
        }
    }

    /// One-line JSON error record for stderr.
    pub fn record(&self) -> serde_json::Value {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}
