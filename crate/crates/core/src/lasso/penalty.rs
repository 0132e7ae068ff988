use serde::{Deserialize, Serialize};

use super::cd::{cd_solve, Stop, penalty_vector, restricted_ols, support_of};
use super::cv::{default_ratio, log_grid, CvFolds, CvOptions};
use super::gram::GramProblem;
use super::standardize::standardize;
use super::{CvCurve, LassoFit, Mix, PenaltyKind, PenaltySpec, MIX_GRID};
use crate::error::{Error, Result};
use crate::numkit::{dist::normal_quantile, Matrix};

/// `2 sigma sqrt(2 (1 + tau) log(p) / n)`, on the per-observation scale.
pub fn lambda_bya(sigma: f64, n: usize, p: usize, tau: f64) -> Result<f64> {
    if !(sigma > 0.0) || !(tau > 0.0) || p < 2 || n == 0 {
        return Err(Error::Domain(format!(
            "bya penalty needs sigma > 0, tau > 0, p >= 2 (sigma = {sigma}, tau = {tau}, p = {p})"
        )));
    }
    Ok(2.0 * sigma * (2.0 * (1.0 + tau) * (p as f64).ln() / n as f64).sqrt())
}

/// Constants of the heteroscedasticity-robust plug-in penalty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcchParams {
    pub c: f64,
    /// `None` uses `0.1 / log(max(p, n))`.
    pub gamma: Option<f64>,
    pub refinement_rounds: usize,
}

impl Default for BcchParams {
    fn default() -> Self {
        BcchParams {
            c: 1.1,
            gamma: None,
            refinement_rounds: 2,
        }
    }
}

fn residuals(xs: &Matrix, ys: &[f64], beta: &[f64]) -> Vec<f64> {
    let mut e = ys.to_vec();
    for (j, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            for (i, ei) in e.iter_mut().enumerate() {
                *ei -= xs[(i, j)] * b;
            }
        }
    }
    e
}

fn max_loading(xs: &Matrix, e: &[f64], penalized: &[usize]) -> f64 {
    let n = xs.nrows() as f64;
    penalized
        .iter()
        .map(|&j| {
            let s: f64 = xs.column(j).iter().zip(e).map(|(x, r)| x * x * r * r).sum();
            (s / n).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Plug-in penalty `2 c sqrt(n) Phi^-1(1 - gamma / (2p)) max_j psi_j` with
/// `psi_j = sqrt(mean(x_ij^2 e_i^2))`. The residuals start from a regression
/// on the unpenalized columns and are refreshed from post-Lasso fits.
///
/// `xs` and `ys` are expected centred (standardized columns).
pub fn lambda_bcch(
    xs: &Matrix,
    ys: &[f64],
    unpenalized: &[usize],
    params: &BcchParams,
) -> Result<f64> {
    let (n, p) = xs.shape();
    if n != ys.len() {
        return Err(Error::Dimension(format!("X has {n} rows, y has {}", ys.len())));
    }
    if params.refinement_rounds < 1 {
        return Err(Error::Domain("bcch needs at least one refinement round".into()));
    }
    let penalized: Vec<usize> = (0..p).filter(|j| !unpenalized.contains(j)).collect();
    let pp = penalized.len().max(1);
    let gamma = params
        .gamma
        .unwrap_or_else(|| 0.1 / (p.max(n) as f64).ln());
    let base = 2.0 * params.c * (n as f64).sqrt() * normal_quantile(1.0 - gamma / (2.0 * pp as f64));

    let prob = GramProblem::from_data(xs, ys)?;
    let pen = penalty_vector(p, &vec![1.0; p], unpenalized);
    let mut e = residuals(xs, ys, &restricted_ols(&prob, unpenalized));
    let mut lambda = 0.0;
    for round in 0..=params.refinement_rounds {
        let scale = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ymag = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(scale > 1e-12 * ymag.max(f64::MIN_POSITIVE)) {
            return Err(Error::Degenerate("bcch residuals are identically zero".into()));
        }
        lambda = base * max_loading(xs, &e, &penalized);
        if round == params.refinement_rounds {
            break;
        }
        let mut beta = vec![0.0; p];
        cd_solve(&prob, lambda, &pen, 1.0, &mut beta, Stop::Exact);
        let mut cols = support_of(&beta);
        cols.extend_from_slice(unpenalized);
        cols.sort_unstable();
        cols.dedup();
        e = residuals(xs, ys, &restricted_ols(&prob, &cols));
    }
    Ok(lambda)
}

/// Outcome of resolving a [`PenaltySpec`] and fitting on the original scale.
#[derive(Clone, Debug)]
pub struct LassoSelection {
    /// Coefficients and intercept on the scale of the input `x`; support
    /// decided on the standardized scale.
    pub fit: LassoFit,
    /// Penalty applied to the standardized problem (after `scale`).
    pub lambda: f64,
    pub mix: f64,
    pub curve: Option<CvCurve>,
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// A standardized least-squares problem ready for repeated penalized fits.
pub(crate) struct Problem {
    pub xs: Matrix,
    pub ys: Vec<f64>,
    transform: super::Transform,
    gram: GramProblem,
}

impl Problem {
    pub fn new(x: &Matrix, y: &[f64]) -> Result<Self> {
        let (xs, ys, transform) = standardize(x, y)?;
        let gram = GramProblem::from_data(&xs, &ys)?;
        Ok(Problem {
            xs,
            ys,
            transform,
            gram,
        })
    }

    fn p(&self) -> usize {
        self.xs.ncols()
    }
}

/// Cross-validation result reusable by the `min` and `1se` rules.
#[derive(Clone, Debug)]
pub(crate) struct CvChoice {
    pub curve: CvCurve,
    pub mix: f64,
}

pub(crate) fn check_weights(p: usize, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    match weights {
        Some(w) if w.len() != p => Err(Error::Dimension(format!("{} weights for {p} columns", w.len()))),
        Some(w) => Ok(w.to_vec()),
        None => Ok(vec![1.0; p]),
    }
}

/// K-fold CV on `problem`, over the mix grid when `mix` is cross-validated.
pub(crate) fn cross_validate(
    problem: &Problem,
    unpenalized: &[usize],
    weights: Option<&[f64]>,
    mix: Mix,
    seed: u64,
) -> Result<CvChoice> {
    let (n, p) = problem.xs.shape();
    let pen = penalty_vector(p, &check_weights(p, weights)?, unpenalized);
    let opts = CvOptions::default();
    let folds = CvFolds::new(&problem.xs, &problem.ys, opts.folds, seed)?;
    let mixes: Vec<f64> = match mix {
        Mix::Fixed(m) => vec![m],
        Mix::CrossValidated => MIX_GRID.to_vec(),
    };
    let mut best: Option<(f64, CvChoice)> = None;
    for m in mixes {
        let lmax = folds.lambda_max(&pen, m);
        if !(lmax > 0.0) {
            return Err(Error::Degenerate(
                "outcome is orthogonal to every penalized column".into(),
            ));
        }
        let grid = log_grid(lmax, default_ratio(n, p), opts.grid_size);
        let curve = folds.curve(&grid, &pen, m);
        let err = curve.mean_error[curve.index_min];
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, CvChoice { curve, mix: m }));
        }
    }
    Ok(best.expect("mix grid is non-empty").1)
}

/// Resolve the penalty of `spec` on `problem` and fit. Cross-validated
/// rules use `cv` when given and run their own CV otherwise.
pub(crate) fn fit_problem(
    problem: &Problem,
    unpenalized: &[usize],
    spec: &PenaltySpec,
    weights: Option<&[f64]>,
    seed: u64,
    cv: Option<&CvChoice>,
) -> Result<LassoSelection> {
    spec.validate()?;
    let cv_kind = matches!(spec.kind, PenaltyKind::CvMin | PenaltyKind::Cv1se);
    if spec.mix == Mix::CrossValidated && !cv_kind {
        return Err(Error::Config("a cross-validated mix needs a cross-validated penalty".into()));
    }
    let (n, p) = problem.xs.shape();
    let w = check_weights(p, weights)?;
    let pen = penalty_vector(p, &w, unpenalized);
    let n_penalized = pen.iter().filter(|v| **v != 0.0).count();

    let (lambda, mix, curve) = match spec.kind {
        PenaltyKind::Fixed => (spec.lambda.unwrap_or(0.0), fixed_mix(spec), None),
        PenaltyKind::Bya => {
            // Unknown noise level: bound it by the outcome's own sd.
            let sigma = spec.sigma.unwrap_or_else(|| std_dev(&problem.ys));
            let l = n as f64 * lambda_bya(sigma, n, n_penalized, spec.tau)?;
            (l, fixed_mix(spec), None)
        }
        PenaltyKind::Bcch => {
            let l = lambda_bcch(&problem.xs, &problem.ys, unpenalized, &BcchParams::default())?;
            (l, fixed_mix(spec), None)
        }
        PenaltyKind::CvMin | PenaltyKind::Cv1se => {
            let owned;
            let choice = match cv {
                Some(c) => c,
                None => {
                    owned = cross_validate(problem, unpenalized, weights, spec.mix, seed)?;
                    &owned
                }
            };
            let c = &choice.curve;
            let l = if spec.kind == PenaltyKind::CvMin {
                c.lambda_min
            } else {
                c.lambda_1se
            };
            (l, choice.mix, Some(c.clone()))
        }
    };
    let lambda = lambda * spec.scale;

    let mut theta = vec![0.0; problem.p()];
    let (sweeps, converged) = cd_solve(&problem.gram, lambda, &pen, mix, &mut theta, Stop::Exact);
    let support = support_of(&theta);
    let (coefficients, intercept) = problem.transform.coefficients(&theta);
    Ok(LassoSelection {
        fit: LassoFit {
            coefficients,
            intercept,
            lambda_used: lambda,
            support,
            n_iterations: sweeps,
            converged,
        },
        lambda,
        mix,
        curve,
    })
}

/// Standardize, resolve the penalty level and fit.
///
/// `weights` are per-column penalty weights on the standardized scale
/// (`None` for the plain Lasso). Columns in `unpenalized` are never
/// shrunk. `seed` drives fold assignment for cross-validated rules.
pub fn select_lasso(
    x: &Matrix,
    y: &[f64],
    unpenalized: &[usize],
    spec: &PenaltySpec,
    weights: Option<&[f64]>,
    seed: u64,
) -> Result<LassoSelection> {
    if let Some(&j) = unpenalized.iter().find(|&&j| j >= x.ncols()) {
        return Err(Error::Dimension(format!("unpenalized column {j} out of range")));
    }
    let problem = Problem::new(x, y)?;
    fit_problem(&problem, unpenalized, spec, weights, seed, None)
}

fn fixed_mix(spec: &PenaltySpec) -> f64 {
    match spec.mix {
        Mix::Fixed(m) => m,
        Mix::CrossValidated => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bya_reference_value() {
        let l = lambda_bya(1.0, 400, 210, 1.0).unwrap();
        let direct = 2.0 * (2.0 / 400.0 * 2.0 * 210f64.ln()).sqrt();
        assert!((l - direct).abs() < 1e-15);
        assert!((l - 0.4625).abs() < 5e-4);
    }

    #[test]
    fn bya_is_linear_in_sigma() {
        let a = lambda_bya(1.0, 100, 50, 0.5).unwrap();
        let b = lambda_bya(2.0, 100, 50, 0.5).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-14);
    }

    #[test]
    fn bya_rejects_bad_inputs() {
        assert!(lambda_bya(0.0, 10, 5, 1.0).is_err());
        assert!(lambda_bya(1.0, 10, 1, 1.0).is_err());
        assert!(lambda_bya(1.0, 10, 5, 0.0).is_err());
    }
}
