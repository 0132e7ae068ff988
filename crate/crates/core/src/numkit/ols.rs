use nalgebra::DVector;

use super::Matrix;
use crate::error::{Error, Result};

/// Covariance estimator attached to an OLS fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Robust {
    /// `sigma2 (X'X)^-1`
    None,
    /// White sandwich with the `n / (n - k)` small-sample factor.
    Hc1,
}

/// Result of [`ols_fit`].
#[derive(Clone, Debug)]
pub struct FitSummary {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `rss / dof`
    pub sigma2: f64,
    pub cov: Matrix,
    pub tstats: Vec<f64>,
    /// `n - k`
    pub dof: usize,
    pub rss: f64,
    pub robust: Robust,
}

impl FitSummary {
    pub fn se(&self, j: usize) -> f64 {
        self.cov[(j, j)].max(0.0).sqrt()
    }

    pub fn nobs(&self) -> usize {
        self.residuals.len()
    }
}

/// Rank threshold on `|R_jj|` of the Householder QR factor.
pub fn rank_tolerance(n: usize, k: usize, max_col_norm: f64) -> f64 {
    f64::EPSILON * n.max(k) as f64 * max_col_norm
}

/// Columns whose QR pivot falls below [`rank_tolerance`]; each is (numerically)
/// spanned by the columns before it.
fn deficient_columns(r: &Matrix, design: &Matrix) -> Vec<usize> {
    let max_norm = design
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let tol = rank_tolerance(design.nrows(), design.ncols(), max_norm);
    (0..design.ncols())
        .filter(|&j| r[(j, j)].abs() <= tol)
        .collect()
}

/// Fail with [`Error::Singular`] listing every collinear column of `design`.
pub fn check_full_rank(design: &Matrix) -> Result<()> {
    if design.ncols() == 0 {
        return Ok(());
    }
    if design.nrows() < design.ncols() {
        return Err(Error::Singular {
            columns: (design.nrows()..design.ncols()).collect(),
        });
    }
    let r = design.clone().qr().r();
    let bad = deficient_columns(&r, design);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Singular { columns: bad })
    }
}

/// Least squares via Householder QR.
pub fn ols_fit(design: &Matrix, y: &[f64], robust: Robust) -> Result<FitSummary> {
    let (n, k) = design.shape();
    if n != y.len() {
        return Err(Error::Dimension(format!(
            "design has {n} rows but y has length {}",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::Dimension(format!(
            "need more rows than columns, got {n}x{k}"
        )));
    }
    if design.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in regression input".into()));
    }

    let yv = DVector::from_column_slice(y);
    let (coef, xtx_inv) = if k == 0 {
        (DVector::zeros(0), Matrix::zeros(0, 0))
    } else {
        let qr = design.clone().qr();
        let r = qr.r();
        let bad = deficient_columns(&r, design);
        if let Some(&first) = bad.first() {
            return Err(Error::Singular {
                columns: vec![first],
            });
        }
        let mut qty = yv.clone();
        qr.q_tr_mul(&mut qty);
        let coef = r
            .solve_upper_triangular(&qty.rows(0, k).into_owned())
            .ok_or(Error::Singular { columns: vec![k - 1] })?;
        let r_inv = r
            .solve_upper_triangular(&Matrix::identity(k, k))
            .ok_or(Error::Singular { columns: vec![k - 1] })?;
        (coef, &r_inv * r_inv.transpose())
    };

    let fitted = design * &coef;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = n - k;
    let sigma2 = rss / dof as f64;

    let cov = match robust {
        Robust::None => &xtx_inv * sigma2,
        Robust::Hc1 => {
            let mut a = design * &xtx_inv;
            for (i, e) in residuals.iter().enumerate() {
                a.row_mut(i).scale_mut(*e);
            }
            let meat = a.tr_mul(&a);
            let c = meat * (n as f64 / dof as f64);
            (&c + c.transpose()) * 0.5
        }
    };

    let tstats = (0..k)
        .map(|j| {
            let v = cov[(j, j)];
            if v > 0.0 {
                coef[j] / v.sqrt()
            } else {
                f64::NAN
            }
        })
        .collect();

    Ok(FitSummary {
        coefficients: coef.iter().copied().collect(),
        residuals,
        sigma2,
        cov,
        tstats,
        dof,
        rss,
        robust,
    })
}
