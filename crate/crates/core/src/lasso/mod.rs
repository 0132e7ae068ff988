//! Weighted elastic-net by cyclic coordinate descent.
//!
//! The objective keeps the unnormalised least-squares scale
//!
//! ```text
//! sum_i (y_i - x_i theta)^2 + lambda * sum_j w_j [ mix |theta_j| + (1 - mix) theta_j^2 / 2 ]
//! ```
//!
//! over the penalized coordinates; `mix = 1` is the Lasso. Penalty levels
//! come from [`PenaltySpec`]: a fixed value, the `bya` and `bcch` plug-in
//! rules, or K-fold cross-validation (`min` / `1se`).

mod adaptive;
mod cd;
mod cv;
mod gram;
mod penalty;
mod standardize;

pub use adaptive::{adaptive_weights, pilot_coefficients, ridge_loo, weights_from_pilot};
pub use cd::{coordinate_descent, lambda_max, lasso_objective};
pub use cv::{cv_lambda, cv_lambda_with, log_grid, CvOptions};
pub use penalty::{lambda_bcch, lambda_bya, select_lasso, BcchParams, LassoSelection};
pub use standardize::{standardize, Transform};

pub(crate) use penalty::{cross_validate, fit_problem, CvChoice, Problem};

use serde::{Deserialize, Serialize};

/// Stop when the largest coefficient change in a sweep drops below this.
pub const CD_TOL: f64 = 1e-7;
pub const MAX_SWEEPS: usize = 10_000;
/// Relative stopping level for warm-started penalty grids (see [`cv_lambda`]).
pub const PATH_TOL: f64 = 1e-7;
/// Standardized coefficients at or below this magnitude are outside the support.
pub const SUPPORT_TOL: f64 = 1e-9;

/// KKT tolerance for a fit at penalty `lambda`.
pub fn kkt_tol(lambda: f64) -> f64 {
    1e-6 * (1.0 + lambda)
}

/// How the penalty level is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    Fixed,
    Bya,
    Bcch,
    CvMin,
    Cv1se,
}

/// Elastic-net mixing: fixed, or chosen by an outer CV over [`MIX_GRID`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mix {
    Fixed(f64),
    CrossValidated,
}

pub const MIX_GRID: [f64; 6] = [0.1, 0.3, 0.5, 0.7, 0.9, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    /// Required iff `kind == Fixed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// `bya` only.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// `bya` only: known error standard deviation; estimated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_mix")]
    pub mix: Mix,
    /// Multiplier applied to the resolved penalty; 0 gives least squares.
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_tau() -> f64 {
    1.0
}
fn default_mix() -> Mix {
    Mix::Fixed(1.0)
}
fn default_scale() -> f64 {
    1.0
}

impl PenaltySpec {
    fn of(kind: PenaltyKind) -> Self {
        PenaltySpec {
            kind,
            lambda: None,
            tau: 1.0,
            sigma: None,
            mix: Mix::Fixed(1.0),
            scale: 1.0,
        }
    }
    pub fn fixed(lambda: f64) -> Self {
        PenaltySpec {
            lambda: Some(lambda),
            ..Self::of(PenaltyKind::Fixed)
        }
    }
    pub fn bya() -> Self {
        Self::of(PenaltyKind::Bya)
    }
    pub fn bcch() -> Self {
        Self::of(PenaltyKind::Bcch)
    }
    pub fn cv_min() -> Self {
        Self::of(PenaltyKind::CvMin)
    }
    pub fn cv_1se() -> Self {
        Self::of(PenaltyKind::Cv1se)
    }
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
    pub fn with_mix(mut self, mix: Mix) -> Self {
        self.mix = mix;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error::Config;
        match (self.kind, self.lambda) {
            (PenaltyKind::Fixed, None) => return Err(Config("fixed penalty needs a lambda".into())),
            (PenaltyKind::Fixed, Some(l)) if !(l >= 0.0) => {
                return Err(Config(format!("lambda must be >= 0, got {l}")))
            }
            (k, Some(_)) if k != PenaltyKind::Fixed => {
                return Err(Config("lambda is only valid for a fixed penalty".into()))
            }
            _ => {}
        }
        if !(self.tau > 0.0) {
            return Err(Config(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Config(format!("scale must be finite and >= 0, got {}", self.scale)));
        }
        if let Mix::Fixed(m) = self.mix {
            if !(m > 0.0 && m <= 1.0) {
                return Err(Config(format!("mix must lie in (0, 1], got {m}")));
            }
        }
        Ok(())
    }

    /// Short tag used in method labels: `min`, `1se`, `bya`, `bcch` or the value.
    pub fn tag(&self) -> String {
        let base = match self.kind {
            PenaltyKind::Fixed => format!("{}", self.lambda.unwrap_or(0.0)),
            PenaltyKind::Bya => "bya".into(),
            PenaltyKind::Bcch => "bcch".into(),
            PenaltyKind::CvMin => "min".into(),
            PenaltyKind::Cv1se => "1se".into(),
        };
        if self.scale != 1.0 {
            format!("{base}x{}", self.scale)
        } else {
            base
        }
    }
}

/// A fitted (elastic-net) Lasso.
#[derive(Clone, Debug)]
pub struct LassoFit {
    /// On the scale of the input passed to the fitting routine.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda_used: f64,
    /// Columns with non-zero coefficients, ascending.
    pub support: Vec<usize>,
    pub n_iterations: usize,
    pub converged: bool,
}

/// K-fold cross-validation curve along a descending penalty grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvCurve {
    pub lambda_grid: Vec<f64>,
    pub mean_error: Vec<f64>,
    pub se_error: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_1se: f64,
    pub index_min: usize,
    pub index_1se: usize,
}
