//! One module per subcommand. Each takes a fully resolved configuration and
//! returns the envelope after writing its payload tables.

pub mod asymrisk;
pub mod fdr;
pub mod optimize;
pub mod select;
pub mod simulate;

use std::fs;
use std::path::PathBuf;

use featsel::StreamSeed;

use crate::error::{CliError, Result};

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunContext {
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

impl RunContext {
    /// Root stream for `command`; commands never share random streams.
    pub fn stream(&self, command: &str) -> StreamSeed {
        StreamSeed::new(self.seed).named(command)
    }

    pub fn prepare_out(&self) -> Result<()> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::Config(format!("{}: {e}", self.out.display())))
    }
}
