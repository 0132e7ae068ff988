use super::dist::{chi2_sf, f_sf};
use super::ols::{ols_fit, FitSummary, Robust};
use super::Matrix;
use crate::error::{Error, Result};

/// Outcome of a diagnostic or nested-model test.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub pvalue: f64,
    pub dof: f64,
    /// Denominator degrees of freedom for F tests.
    pub dof2: Option<f64>,
}

/// Jarque–Bera statistic from central moments `m2, m3, m4` (1/n normalised).
pub fn jarque_bera_from_moments(n: usize, m2: f64, m3: f64, m4: f64) -> TestResult {
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let statistic = n as f64 * (skew * skew / 6.0 + (kurt - 3.0).powi(2) / 24.0);
    TestResult {
        statistic,
        pvalue: chi2_sf(statistic, 2.0),
        dof: 2.0,
        dof2: None,
    }
}

/// Jarque–Bera normality test on regression residuals.
pub fn normality_test(residuals: &[f64]) -> Result<TestResult> {
    let n = residuals.len();
    if n < 8 {
        return Err(Error::Dimension(format!(
            "normality test needs at least 8 residuals, got {n}"
        )));
    }
    let mean = super::mean(residuals);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &e in residuals {
        let d = e - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let nf = n as f64;
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let scale = residuals.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    if m2 <= f64::EPSILON * f64::EPSILON * scale * scale || m2 == 0.0 {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    Ok(jarque_bera_from_moments(n, m2, m3, m4))
}

/// Breusch–Pagan `n R^2` from the auxiliary regression's explained and total
/// sums of squares; `k` slope regressors.
pub fn breusch_pagan_from_moments(n: usize, ess: f64, tss: f64, k: usize) -> TestResult {
    let dof = k as f64;
    if !(tss > 0.0) || k == 0 {
        return TestResult {
            statistic: 0.0,
            pvalue: 1.0,
            dof,
            dof2: None,
        };
    }
    let r2 = (ess / tss).clamp(0.0, 1.0);
    let statistic = n as f64 * r2;
    TestResult {
        statistic,
        pvalue: chi2_sf(statistic, dof),
        dof,
        dof2: None,
    }
}

/// Breusch–Pagan test: `n R^2` of squared residuals on `[1, regressors]`.
pub fn hetero_test(residuals: &[f64], regressors: &Matrix) -> Result<TestResult> {
    let n = residuals.len();
    if regressors.nrows() != n {
        return Err(Error::Dimension(format!(
            "regressors have {} rows, residuals {}",
            regressors.nrows(),
            n
        )));
    }
    let k = regressors.ncols();
    let u: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let ubar = super::mean(&u);
    let tss: f64 = u.iter().map(|v| (v - ubar).powi(2)).sum();
    if tss <= f64::EPSILON * ubar * ubar {
        return Ok(breusch_pagan_from_moments(n, 0.0, 0.0, k));
    }
    let mut aux = Matrix::zeros(n, k + 1);
    aux.column_mut(0).fill(1.0);
    aux.columns_mut(1, k).copy_from(regressors);
    let fit = ols_fit(&aux, &u, Robust::None)?;
    let ess = (tss - fit.rss).max(0.0);
    Ok(breusch_pagan_from_moments(n, ess, tss, k))
}

/// Nested-model F test from residual sums of squares.
pub fn f_test_from_rss(rss_r: f64, rss_u: f64, dropped: usize, dof_u: usize) -> Result<TestResult> {
    if dropped == 0 {
        return Err(Error::Domain("F test needs at least one dropped regressor".into()));
    }
    if !(rss_u > 0.0) || dof_u == 0 {
        return Err(Error::Degenerate(
            "unrestricted model fits perfectly; F test undefined".into(),
        ));
    }
    let d1 = dropped as f64;
    let d2 = dof_u as f64;
    let num = (rss_r - rss_u).max(0.0) / d1;
    let statistic = num / (rss_u / d2);
    Ok(TestResult {
        statistic,
        pvalue: f_sf(statistic, d1, d2),
        dof: d1,
        dof2: Some(d2),
    })
}

/// Encompassing (backtest) F test of a restricted model against the
/// unrestricted model it is nested in.
pub fn encompassing_f_test(
    restricted: &FitSummary,
    unrestricted: &FitSummary,
    dropped: usize,
) -> Result<TestResult> {
    if restricted.nobs() != unrestricted.nobs() {
        return Err(Error::Dimension("models fitted on different samples".into()));
    }
    f_test_from_rss(restricted.rss, unrestricted.rss, dropped, unrestricted.dof)
}
