//! Treatment-effect estimation in high-dimensional linear regression.
//!
//! The crate estimates the scalar effect `delta` in
//!
//! ```text
//! y = X beta + d delta + eps
//! d = X gamma + eta
//! ```
//!
//! after selecting controls from `X`, either once from the outcome equation
//! (single selection) or from both equations with the union of the two
//! supports fed to a final robust OLS (double selection). Two selector
//! families are provided:
//!
//! * [`lasso`]: a weighted elastic-net coordinate-descent solver with fixed,
//!   plug-in (`bya`, `bcch`) and cross-validated (`min`, `1se`) penalties and
//!   adaptive weights;
//! * [`gets`]: a general-to-specific multi-path search steered by a target
//!   size `alpha`, with block search when there are more candidates than
//!   observations.
//!
//! [`estimators`] assembles the Post-Lasso / Post-Double-Lasso /
//! Post-Double-Autometrics-style estimators, [`simlab`] is the Monte Carlo
//! laboratory (Toeplitz designs, non-centrality calibration, bias / RMSE /
//! potency / gauge) and [`cli`] holds the command implementations behind the
//! `pdsel` binary, including the growth-data loader.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod gets;
pub mod lasso;
pub mod numkit;
pub mod simlab;

pub use error::{Error, Result};
pub use numkit::Matrix;
