use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const ENVELOPE_FILE: &str = "envelope.json";

/// Record written next to the payload tables of every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Resolved configuration; feeding it back through `--config` reproduces the payload.
    pub config: serde_json::Value,
    pub wall_time_secs: f64,
    /// Payload file names, relative to the envelope.
    pub payload: Vec<String>,
    pub summary: serde_json::Value,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Envelope {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            wall_time_secs: 0.0,
            payload: Vec::new(),
            summary: serde_json::Value::Null,
            warnings: Vec::new(),
        }
    }

    pub fn finish(mut self, elapsed: Duration) -> Self {
        self.wall_time_secs = elapsed.as_secs_f64();
        self
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(ENVELOPE_FILE);
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

/// Write `rows` as CSV under `dir/name` and return the file name.
pub fn write_table<R: Serialize>(dir: &Path, name: &str, rows: &[R]) -> Result<String> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(name.to_owned())
}
