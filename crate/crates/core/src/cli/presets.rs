//! Replication recipes for the published tables and figure grids.

use std::path::PathBuf;

use super::config::{Command, RunConfig, Sweep};
use super::growth::default_growth_path;
use crate::error::{Error, Result};
use crate::estimators::MethodSpec;
use crate::lasso::PenaltySpec;
use crate::simlab::DgpConfig;

pub const PRESETS: [&str; 6] = ["table1", "table2", "fig2", "fig3-6", "fig7-10", "fig12"];

/// Master seed shared by every recipe.
pub const PRESET_SEED: u64 = 20_240_917;
pub const TABLE1_REPS: usize = 1000;
pub const GRID_REPS: usize = 200;

fn penalties() -> [PenaltySpec; 4] {
    [
        PenaltySpec::cv_min(),
        PenaltySpec::cv_1se(),
        PenaltySpec::bya(),
        PenaltySpec::bcch(),
    ]
}

fn cv_penalties() -> [PenaltySpec; 2] {
    [PenaltySpec::cv_min(), PenaltySpec::cv_1se()]
}

/// The sixteen Monte Carlo methods: OLS benchmarks, single and double Lasso
/// under four penalties, double adaptive Lasso, and both GETS variants at
/// 5% and 1%.
pub fn table1_roster() -> Vec<MethodSpec> {
    let mut m = vec![MethodSpec::ols_all()];
    m.extend(penalties().map(MethodSpec::post_lasso));
    m.extend(penalties().map(MethodSpec::post_double_lasso));
    m.extend(cv_penalties().map(MethodSpec::post_double_adaptive_lasso));
    m.push(MethodSpec::autometrics(0.05));
    m.push(MethodSpec::autometrics(0.01));
    m.push(MethodSpec::post_double_autometrics(0.05));
    m.push(MethodSpec::post_double_autometrics(0.01));
    m.push(MethodSpec::ols_none());
    m
}

/// The growth-application methods.
pub fn table2_roster() -> Vec<MethodSpec> {
    let mut m = vec![MethodSpec::ols_none(), MethodSpec::ols_all()];
    m.extend(
        [
            PenaltySpec::bya(),
            PenaltySpec::cv_min(),
            PenaltySpec::cv_1se(),
            PenaltySpec::bcch(),
        ]
        .map(MethodSpec::post_lasso),
    );
    m.extend(cv_penalties().map(MethodSpec::post_adaptive_lasso));
    m.extend(
        [
            PenaltySpec::bya(),
            PenaltySpec::cv_min(),
            PenaltySpec::cv_1se(),
            PenaltySpec::bcch(),
        ]
        .map(MethodSpec::post_double_lasso),
    );
    m.extend(cv_penalties().map(MethodSpec::post_double_adaptive_lasso));
    m.push(MethodSpec::autometrics(0.05));
    m.push(MethodSpec::autometrics(0.01));
    m.push(MethodSpec::post_double_autometrics(0.05));
    m.push(MethodSpec::post_double_autometrics(0.01));
    m
}

/// Double-selection methods tracked across the figure grids.
pub fn figure_roster() -> Vec<MethodSpec> {
    let mut m: Vec<MethodSpec> = penalties().map(MethodSpec::post_double_lasso).into();
    m.extend(cv_penalties().map(MethodSpec::post_double_adaptive_lasso));
    m.push(MethodSpec::post_double_autometrics(0.05));
    m.push(MethodSpec::post_double_autometrics(0.01));
    m
}

/// `-0.9, -0.8, ..., 0.9`.
pub fn rho_grid() -> Vec<f64> {
    (-9..=9).map(|i| i as f64 / 10.0).collect()
}

/// `1, 2, ..., 8`.
pub fn psi_d_grid() -> Vec<f64> {
    (1..=8).map(f64::from).collect()
}

/// Configuration of recipe `name`. `data` overrides the default location
/// of the growth file for the empirical recipes.
pub fn preset(name: &str, out_dir: PathBuf, data: Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(Command::Replicate, out_dir);
    cfg.preset = Some(name.to_string());
    cfg.seed = PRESET_SEED;
    let growth = || {
        data.clone().or_else(default_growth_path).ok_or_else(|| {
            Error::Usage(format!(
                "`{name}` needs the growth data: pass --data or set {}",
                super::growth::DATA_ENV
            ))
        })
    };
    match name {
        "table1" => {
            cfg.dgp = Some(DgpConfig::new(400, 210, 0.0, 2.5, 4.0));
            cfg.methods = table1_roster();
            cfg.reps = TABLE1_REPS;
        }
        "fig2" | "fig3-6" | "fig7-10" => {
            let n = if name == "fig7-10" { 200 } else { 400 };
            cfg.dgp = Some(DgpConfig::new(n, 210, 0.0, 2.5, 4.0));
            cfg.rho_grid = rho_grid();
            cfg.psi_d_grid = if name == "fig2" { vec![4.0] } else { psi_d_grid() };
            cfg.methods = figure_roster();
            cfg.reps = GRID_REPS;
        }
        "table2" => {
            cfg.data_path = Some(growth()?);
            cfg.methods = table2_roster();
            cfg.drop_var = Some("im1".into());
            cfg.track_var = Some("im1".into());
        }
        "fig12" => {
            cfg.data_path = Some(growth()?);
            cfg.sweeps = vec![Sweep::Tau, Sweep::Alpha];
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown recipe `{other}`; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_has_sixteen_methods() {
        let labels: Vec<String> = table1_roster().iter().map(|m| m.label()).collect();
        assert_eq!(labels.len(), 16);
        assert!(labels.contains(&"PDL-min".to_string()));
        assert!(labels.contains(&"PDA-5%".to_string()));
        let unique: std::collections::HashSet<_> = labels.iter().collect();
        assert_eq!(unique.len(), 16);
    }

    #[test]
    fn fig2_is_a_rho_grid() {
        let c = preset("fig2", "out".into(), None).unwrap();
        assert_eq!(c.rho_grid.len(), 19);
        assert_eq!(c.psi_d_grid, vec![4.0]);
        assert!(preset("fig13", "out".into(), None).is_err());
    }
}
