//! Run configuration: the oracle's `[grid]` and `[oracle]` tables plus a
//! `[run]` table.  Command-line flags override file values.

use std::path::{Path, PathBuf};

use magsym::numoracle::{GridSpec, OracleConfig, OracleSettings, StencilOrder};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    /// Worker threads for entry-level parallelism (default: all cores).
    pub jobs: Option<usize>,
    /// Catalog file (default: the bundled catalog).
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub grid: GridSpec,
    pub oracle: OracleSettings,
    pub run: RunSettings,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub jobs: Option<usize>,
    pub catalog: Option<PathBuf>,
    pub h: Option<f64>,
    pub order: Option<u32>,
    pub tolerance: Option<f64>,
}

impl Config {
    pub fn parse(src: &str) -> Result<Self, CliError> {
        toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        Self::parse(&src)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self, CliError> {
        if o.jobs.is_some() {
            self.run.jobs = o.jobs;
        }
        if o.catalog.is_some() {
            self.run.catalog = o.catalog.clone();
        }
        if let Some(h) = o.h {
            self.grid = self.grid.with_h(h);
        }
        if let Some(k) = o.order {
            let order = match k {
                2 => StencilOrder::Second,
                4 => StencilOrder::Fourth,
                _ => return Err(CliError::Usage(format!("stencil order must be 2 or 4, got {k}"))),
            };
            self.grid = self.grid.with_order(order);
        }
        if let Some(t) = o.tolerance {
            self.oracle.tolerance = t;
        }
        self.grid.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.run.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        Ok(self)
    }

    pub fn oracle_config(&self) -> OracleConfig {
        OracleConfig { grid: self.grid.clone(), oracle: self.oracle.clone() }
    }
}
