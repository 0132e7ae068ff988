use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dgp::{DgpConfig, Simulator};
use super::{splitmix64, substream};
use crate::error::{Error, Result};
use crate::estimators::{MethodSpec, Workspace};

/// What one method produced on one replication.
#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub delta_hat: f64,
    pub se: f64,
    pub support: Vec<usize>,
    /// Selected controls per equation (empty for the OLS benchmarks).
    pub per_equation: Vec<Vec<usize>>,
}

/// Aggregated performance of one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: String,
    pub bias: f64,
    pub rmse: f64,
    pub potency: f64,
    pub gauge: f64,
    pub mc_se_bias: f64,
    pub mc_se_rmse: f64,
    pub mc_se_potency: f64,
    pub mc_se_gauge: f64,
    /// Replications on which the method returned an error.
    pub failures: usize,
    /// Replications attempted.
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub config: DgpConfig,
    pub seed: u64,
    pub reps: usize,
    pub methods: Vec<MethodStats>,
}

impl McReport {
    pub fn get(&self, label: &str) -> Option<&MethodStats> {
        self.methods.iter().find(|m| m.method == label)
    }

    pub fn failures(&self) -> usize {
        self.methods.iter().map(|m| m.failures).sum()
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let r = v.len() as f64;
    let m = v.iter().sum::<f64>() / r;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r - 1.0);
    (m, (var / r).sqrt())
}

/// Bias, RMSE, potency and gauge of `draws` (`None` for a failed
/// replication) against the true `delta` and relevant set.
pub fn summarize(
    label: &str,
    draws: &[Option<Draw>],
    delta: f64,
    relevant: &[usize],
    p: usize,
) -> MethodStats {
    let ok: Vec<&Draw> = draws.iter().flatten().collect();
    let err: Vec<f64> = ok.iter().map(|d| d.delta_hat - delta).collect();
    let sq: Vec<f64> = err.iter().map(|e| e * e).collect();
    let irrelevant = p - relevant.len();
    let share = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let pot: Vec<f64> = ok
        .iter()
        .map(|d| {
            let hit = d.support.iter().filter(|j| relevant.contains(j)).count();
            share(hit, relevant.len())
        })
        .collect();
    let gau: Vec<f64> = ok
        .iter()
        .map(|d| {
            let hit = d.support.iter().filter(|j| !relevant.contains(j)).count();
            share(hit, irrelevant)
        })
        .collect();
    let (bias, mc_se_bias) = mean_se(&err);
    let (mse, se_mse) = mean_se(&sq);
    let rmse = mse.sqrt();
    let (potency, mc_se_potency) = mean_se(&pot);
    let (gauge, mc_se_gauge) = mean_se(&gau);
    MethodStats {
        method: label.to_string(),
        bias,
        rmse,
        potency,
        gauge,
        mc_se_bias,
        mc_se_rmse: if rmse > 0.0 { se_mse / (2.0 * rmse) } else { 0.0 },
        mc_se_potency,
        mc_se_gauge,
        failures: draws.len() - ok.len(),
        reps: draws.len(),
    }
}

fn one_replication(sim: &Simulator, methods: &[MethodSpec], seed: u64) -> Vec<Result<Draw>> {
    let data = sim.draw(seed);
    let mut ws = Workspace::new(&data, splitmix64(seed));
    methods
        .iter()
        .map(|m| {
            ws.estimate(m).map(|e| Draw {
                delta_hat: e.delta_hat,
                se: e.se,
                support: e.support_union,
                per_equation: e.per_equation.into_iter().map(|s| s.selected).collect(),
            })
        })
        .collect()
}

/// Raw draws, indexed `[replication][method]`. Replication `r` of grid cell
/// `cell` uses data seed `substream(seed, r, cell)`, so the result does not
/// depend on how rayon schedules the work.
pub fn run_replications(
    config: &DgpConfig,
    methods: &[MethodSpec],
    reps: usize,
    seed: u64,
    cell: u64,
) -> Result<Vec<Vec<Result<Draw>>>> {
    for m in methods {
        m.validate()?;
    }
    let sim = Simulator::new(config)?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| one_replication(&sim, methods, substream(seed, r, cell)))
        .collect())
}

fn report(
    config: &DgpConfig,
    methods: &[MethodSpec],
    reps: usize,
    seed: u64,
    cell: u64,
) -> Result<McReport> {
    if reps < 2 {
        return Err(Error::Config(format!("need at least 2 replications, got {reps}")));
    }
    let draws = run_replications(config, methods, reps, seed, cell)?;
    let mut cols: Vec<Vec<Option<Draw>>> = vec![Vec::with_capacity(reps); methods.len()];
    for row in draws {
        for (k, d) in row.into_iter().enumerate() {
            cols[k].push(d.ok());
        }
    }
    let relevant: Vec<usize> = (0..config.n_relevant).collect();
    let stats = cols
        .iter()
        .zip(methods)
        .map(|(col, m)| summarize(&m.label(), col, config.delta, &relevant, config.p))
        .collect();
    Ok(McReport {
        config: config.clone(),
        seed,
        reps,
        methods: stats,
    })
}

/// Evaluate `methods` over `reps` independent draws of `config`.
pub fn run_monte_carlo(
    config: &DgpConfig,
    methods: &[MethodSpec],
    reps: usize,
    seed: u64,
) -> Result<McReport> {
    report(config, methods, reps, seed, 0)
}

/// One report of an [`experiment_grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub rho: f64,
    pub psi_d: f64,
    pub report: McReport,
}

/// Reports over the `(rho, psi_d)` product grid, `rho` varying slowest.
/// Cell `c` (in that order) draws from its own substreams.
pub fn experiment_grid(
    base: &DgpConfig,
    rho_grid: &[f64],
    psi_d_grid: &[f64],
    methods: &[MethodSpec],
    reps: usize,
    seed: u64,
) -> Result<Vec<GridCell>> {
    if rho_grid.is_empty() || psi_d_grid.is_empty() {
        return Err(Error::Config("grids must be non-empty".into()));
    }
    let mut out = Vec::with_capacity(rho_grid.len() * psi_d_grid.len());
    for (a, &rho) in rho_grid.iter().enumerate() {
        for (b, &psi_d) in psi_d_grid.iter().enumerate() {
            let cell = (a * psi_d_grid.len() + b) as u64;
            let config = DgpConfig {
                rho,
                psi_d,
                ..base.clone()
            };
            let report = report(&config, methods, reps, seed, cell).map_err(|e| {
                Error::Config(format!("cell rho = {rho}, psi_d = {psi_d}: {e}"))
            })?;
            out.push(GridCell { rho, psi_d, report });
        }
    }
    Ok(out)
}
