use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;
use crate::lineshape::ConvergenceReport;
use crate::params::DerivedParams;

pub const MANIFEST_FILE: &str = "manifest.json";

/// One file written by a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub description: String,
    /// Refined-mesh comparison behind the numbers in this file, one entry per
    /// spectrum it was computed from.
    pub convergence: Vec<Option<ConvergenceReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Config in its text form, ready to be fed back with `--config`.
    pub config_text: String,
    pub config: RunConfig,
    pub derived: DerivedParams,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_text: config.to_text(),
            config: config.clone(),
            derived: config.params.derived(),
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, file: &Path, description: &str, convergence: Vec<Option<ConvergenceReport>>) {
        let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.push(OutputRecord { file: name, description: description.to_string(), convergence });
    }

    /// Stamps the elapsed time and writes `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path, started: Instant) -> Result<PathBuf> {
        self.wall_clock_seconds = started.elapsed().as_secs_f64();
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(path)
    }
}
