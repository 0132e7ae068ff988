//! Empirical reports on a real dataset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{final_stage, Dataset, MethodSpec, TreatmentEstimate, Workspace};
use crate::lasso::PenaltySpec;

/// One estimator row: effect, robust s.e., interval, support size and
/// whether the interval excludes zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub method: String,
    pub delta_hat: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub k_star: usize,
    pub sig10: bool,
}

impl EstimateRow {
    pub fn new(method: &str, e: &TreatmentEstimate) -> Self {
        EstimateRow {
            method: method.to_string(),
            delta_hat: e.delta_hat,
            se: e.se,
            ci_low: e.ci.low,
            ci_high: e.ci.high,
            level: e.level,
            k_star: e.k_star,
            sig10: e.significant(),
        }
    }
}

/// With/without refit for one method that selected the dropped control.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropRow {
    pub method: String,
    pub variable: String,
    /// Coefficient of the variable in the full final regression.
    pub coefficient: f64,
    pub with_delta: f64,
    pub with_low: f64,
    pub with_high: f64,
    pub with_sig10: bool,
    pub without_delta: f64,
    pub without_low: f64,
    pub without_high: f64,
    pub without_sig10: bool,
}

/// t-statistic of a tracked control in one selection step (`None` when the
/// step did not select it).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TstatRow {
    pub method: String,
    pub step: usize,
    pub variable: String,
    pub tstat: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub delta_hat: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub k_star: usize,
    pub sig10: bool,
}

/// Everything `apply` produces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ApplyReport {
    pub estimates: Vec<EstimateRow>,
    /// `(method, error)` for methods that failed.
    pub failures: Vec<(String, String)>,
    /// Variable names, and for each a 0/1 flag per successful method.
    pub incidence_methods: Vec<String>,
    pub incidence: Vec<(String, Vec<bool>)>,
    pub tstats: Vec<TstatRow>,
    pub dropped: Vec<DropRow>,
    pub sweep: Vec<SweepRow>,
}

/// `tau` grid of the penalty sweep: 0 followed by 50 points on (0.1, 5].
pub fn tau_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((1..=50).map(|i| 0.1 + 4.9 * i as f64 / 50.0))
        .collect()
}

/// Target sizes 0.01, 0.02, ..., 0.10.
pub fn alpha_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 100.0).collect()
}

pub(crate) fn column_of(data: &Dataset, name: &str) -> Result<usize> {
    data.column(name)
        .ok_or_else(|| Error::Usage(format!("no control named `{name}`")))
}

/// Refit `estimate` without control `j`.
pub fn without_control(
    data: &Dataset,
    estimate: &TreatmentEstimate,
    j: usize,
) -> Result<TreatmentEstimate> {
    let kept: Vec<usize> = estimate
        .support_union
        .iter()
        .copied()
        .filter(|&c| c != j)
        .collect();
    final_stage(data, &kept, estimate.level, vec![])
}

pub struct ApplyOptions<'a> {
    pub seed: u64,
    pub level: f64,
    pub drop_var: Option<&'a str>,
    pub track_var: Option<&'a str>,
    pub sweep_tau: bool,
    pub sweep_alpha: bool,
}

/// Run `methods` on `data` and assemble the reports.
pub fn apply(data: &Dataset, methods: &[MethodSpec], opts: &ApplyOptions) -> Result<ApplyReport> {
    let drop = opts.drop_var.map(|v| column_of(data, v)).transpose()?;
    let track = opts.track_var.map(|v| column_of(data, v)).transpose()?;
    let mut ws = Workspace::new(data, opts.seed).with_level(opts.level);
    let mut report = ApplyReport::default();
    let mut kept: Vec<(String, TreatmentEstimate)> = Vec::new();
    for m in methods {
        let label = m.label();
        match ws.estimate(m) {
            Ok(e) => {
                report.estimates.push(EstimateRow::new(&label, &e));
                kept.push((label, e));
            }
            Err(err) => report.failures.push((label, err.to_string())),
        }
    }

    report.incidence_methods = kept.iter().map(|(l, _)| l.clone()).collect();
    for (j, name) in data.names.iter().enumerate() {
        let flags: Vec<bool> = kept.iter().map(|(_, e)| e.support_union.contains(&j)).collect();
        if flags.iter().any(|&f| f) {
            report.incidence.push((name.clone(), flags));
        }
    }

    if let Some(j) = track {
        for (label, e) in &kept {
            for (step, sel) in e.per_equation.iter().enumerate() {
                report.tstats.push(TstatRow {
                    method: label.clone(),
                    step: step + 1,
                    variable: data.names[j].clone(),
                    tstat: sel.tstat_of(j),
                });
            }
        }
    }

    if let Some(j) = drop {
        for (label, e) in &kept {
            let Some(pos) = e.support_union.iter().position(|&c| c == j) else {
                continue;
            };
            let w = without_control(data, e, j)?;
            report.dropped.push(DropRow {
                method: label.clone(),
                variable: data.names[j].clone(),
                coefficient: e.final_fit.coefficients[pos + 2],
                with_delta: e.delta_hat,
                with_low: e.ci.low,
                with_high: e.ci.high,
                with_sig10: e.significant(),
                without_delta: w.delta_hat,
                without_low: w.ci.low,
                without_high: w.ci.high,
                without_sig10: w.significant(),
            });
        }
    }

    let mut sweep_row = |parameter: &str, value: f64, m: &MethodSpec| -> Result<()> {
        let e = ws.estimate(m)?;
        report.sweep.push(SweepRow {
            parameter: parameter.to_string(),
            value,
            delta_hat: e.delta_hat,
            se: e.se,
            ci_low: e.ci.low,
            ci_high: e.ci.high,
            k_star: e.k_star,
            sig10: e.significant(),
        });
        Ok(())
    };
    if opts.sweep_tau {
        for tau in tau_grid() {
            let m = MethodSpec::post_double_lasso(PenaltySpec::cv_min().with_scale(tau));
            sweep_row("tau", tau, &m)?;
        }
    }
    if opts.sweep_alpha {
        for a in alpha_grid() {
            sweep_row("alpha", a, &MethodSpec::post_double_autometrics(a))?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let t = tau_grid();
        assert_eq!(t.len(), 51);
        assert_eq!(t[0], 0.0);
        assert!(t[1] > 0.1 && (t[50] - 5.0).abs() < 1e-12);
        let a = alpha_grid();
        assert_eq!(a.len(), 10);
        assert!((a[9] - 0.10).abs() < 1e-15);
    }
}
