//! Batch jobs and the HTTP/JSON service over `wenxian-core`.

pub mod analytics;
pub mod args;
pub mod config;
pub mod error;
pub mod jobs;
pub mod service;

pub use error::{CliError, Result};
