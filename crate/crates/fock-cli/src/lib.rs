//! Batch front-end for the `fock` library.
//!
//! JSON in, JSON/CSV out. Divergence verdicts are data inside reports; the
//! nonzero exit codes are reserved for malformed input (1) and genuine
//! numerical failure (2). Identical manifests over unchanged inputs
//! reproduce artifacts byte for byte.

pub mod battery;
pub mod codec;
pub mod commands;
pub mod manifest;
pub mod report;

use std::fmt;

pub use manifest::{CommandKind, RunManifest};

/// One output file, assembled in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input: the offending file or flag and the JSON path.
    Input { path: String, message: String },
    /// Internal numerical failure.
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input { path, message } => write!(f, "input error at {path}: {message}"),
            CliError::Numerical(message) => write!(f, "numerical failure: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// Execute a manifest and return its artifacts without touching the
/// filesystem (inputs are still read from their paths).
pub fn run(manifest: &RunManifest) -> Result<Vec<Artifact>, CliError> {
    commands::run(manifest)
}

/// Write artifacts to disk at their recorded names.
pub fn write_artifacts(artifacts: &[Artifact]) -> Result<(), CliError> {
    for a in artifacts {
        if let Some(parent) = std::path::Path::new(&a.name).parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| CliError::Input {
                    path: a.name.clone(),
                    message: format!("cannot create output directory: {e}"),
                })?;
            }
        }
        std::fs::write(&a.name, &a.bytes).map_err(|e| CliError::Input {
            path: a.name.clone(),
            message: format!("cannot write artifact: {e}"),
        })?;
    }
    Ok(())
}
