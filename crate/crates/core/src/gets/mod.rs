//! General-to-specific selection.
//!
//! Starting from the general unrestricted model (GUM) holding every
//! candidate and an intercept, [`gets_select`] runs a multi-path backward
//! search: one path per insignificant GUM variable, each deleting the least
//! significant remaining variable while the residual diagnostics still pass
//! and the reduction is not rejected against the GUM by an F backtest.
//! Terminal models are merged and the search repeats on their union until it
//! stops shrinking; BIC picks among the final terminals. The target size
//! `alpha` drives both the significance cut-off and the backtest.
//!
//! When there are too many candidates for the GUM to be estimable,
//! [`block_select`] runs the search on contiguous blocks and iterates on the
//! union of block survivors.

mod block;
mod engine;

pub use block::block_select;
pub use engine::{bic, gets_select};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of search paths opened, whatever `max_paths` says.
pub const PATH_CAP: usize = 512;

/// Criterion used to choose among terminal models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tiebreak {
    #[default]
    Bic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GetsConfig {
    /// Target size.
    pub alpha: f64,
    /// Level of the Jarque–Bera / Breusch–Pagan battery.
    #[serde(default = "default_diag_level")]
    pub diag_level: f64,
    /// Path budget over the whole search; `None` opens one path per
    /// insignificant GUM variable. Always capped at [`PATH_CAP`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_paths: Option<usize>,
    #[serde(default)]
    pub tiebreak: Tiebreak,
    /// Block size for [`block_select`]; `None` uses `n / 2 - |forced| - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_cap: Option<usize>,
}

fn default_diag_level() -> f64 {
    0.01
}

impl GetsConfig {
    pub fn new(alpha: f64) -> Self {
        GetsConfig {
            alpha,
            diag_level: default_diag_level(),
            max_paths: None,
            tiebreak: Tiebreak::Bic,
            block_cap: None,
        }
    }

    pub fn with_max_paths(mut self, max_paths: usize) -> Self {
        self.max_paths = Some(max_paths);
        self
    }

    pub fn with_block_cap(mut self, cap: usize) -> Self {
        self.block_cap = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.diag_level > 0.0 && self.diag_level < 1.0) {
            return Err(Error::Config(format!(
                "diag_level must lie in (0, 1), got {}",
                self.diag_level
            )));
        }
        if self.max_paths == Some(0) {
            return Err(Error::Config("max_paths must be >= 1".into()));
        }
        if let Some(cap) = self.block_cap {
            if cap < 2 {
                return Err(Error::Config(format!("block_cap must be >= 2, got {cap}")));
            }
        }
        Ok(())
    }

    pub(crate) fn path_budget(&self, p: usize) -> usize {
        self.max_paths.unwrap_or(p).clamp(1, PATH_CAP)
    }
}

/// Outcome of a selection run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Selected columns (forced ones included), ascending.
    pub selected: Vec<usize>,
    pub forced: Vec<usize>,
    /// Selected variables kept only because deleting them failed a check.
    pub retained: Vec<usize>,
    /// t-statistics of `selected` in the terminal model (homoscedastic).
    pub tstats: Vec<f64>,
    pub paths_explored: usize,
    pub terminal_count: usize,
    pub diagnostics_passed: bool,
    /// `alpha` for this engine, the penalty level for Lasso selectors.
    pub tuning_used: f64,
}

impl SelectionResult {
    /// t-statistic of column `j` in the terminal model, if selected.
    pub fn tstat_of(&self, j: usize) -> Option<f64> {
        self.selected
            .iter()
            .position(|&s| s == j)
            .and_then(|pos| self.tstats.get(pos).copied())
    }

    /// Selected columns that were not forced.
    pub fn unforced(&self) -> Vec<usize> {
        self.selected
            .iter()
            .copied()
            .filter(|j| !self.forced.contains(j))
            .collect()
    }
}
