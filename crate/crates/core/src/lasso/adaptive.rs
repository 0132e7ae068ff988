use nalgebra::DVector;

use super::cd::restricted_ols;
use super::gram::GramProblem;
use crate::error::{Error, Result};
use crate::numkit::Matrix;

const RIDGE_GRID: usize = 20;
const WEIGHT_FLOOR: f64 = 1e-4;

fn centered(x: &Matrix, y: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    let n = x.nrows();
    if n != y.len() {
        return Err(Error::Dimension(format!("X has {n} rows, y has {}", y.len())));
    }
    let mut xc = x.clone();
    for mut col in xc.column_iter_mut() {
        let m = col.mean();
        col.add_scalar_mut(-m);
    }
    let ym = y.iter().sum::<f64>() / n as f64;
    Ok((xc, y.iter().map(|v| v - ym).collect()))
}

/// Ridge fit (with intercept) whose penalty minimises the exact
/// leave-one-out error over a 20-point log grid. Returns the slopes and
/// the chosen penalty.
pub fn ridge_loo(x: &Matrix, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (xc, yc) = centered(x, y)?;
    let n = xc.nrows();
    let kernel = &xc * xc.transpose();
    let eig = kernel.symmetric_eigen();
    let top = eig.eigenvalues.max();
    if !(top > 0.0) {
        return Err(Error::Degenerate("design has no variation".into()));
    }
    let u = &eig.eigenvectors;
    let uty = u.transpose() * DVector::from_column_slice(&yc);
    let mut best = (f64::INFINITY, 0.0);
    for g in 0..RIDGE_GRID {
        let k = top * 10f64.powf(1.0 - 5.0 * g as f64 / (RIDGE_GRID - 1) as f64);
        let shrink: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0) / (l.max(0.0) + k)).collect();
        let mut press = 0.0;
        for i in 0..n {
            let mut fit = 0.0;
            let mut h = 0.0;
            for m in 0..n {
                let uim = u[(i, m)];
                fit += uim * shrink[m] * uty[m];
                h += uim * uim * shrink[m];
            }
            // Centring removes one more degree of freedom from each point.
            let h = h + 1.0 / n as f64;
            press += ((yc[i] - fit) / (1.0 - h)).powi(2);
        }
        if press < best.0 {
            best = (press, k);
        }
    }
    let k = best.1;
    let coef_u = DVector::from_iterator(
        n,
        eig.eigenvalues
            .iter()
            .zip(uty.iter())
            .map(|(l, c)| c / (l.max(0.0) + k)),
    );
    let beta = xc.transpose() * (u * coef_u);
    Ok((beta.iter().copied().collect(), k))
}

/// Pilot estimates for adaptive weights: OLS when `p + 1 < n / 2`, ridge
/// otherwise.
pub fn pilot_coefficients(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = x.shape();
    if 2 * (p + 1) < n {
        let (xc, yc) = centered(x, y)?;
        let prob = GramProblem::from_data(&xc, &yc)?;
        let cols: Vec<usize> = (0..p).collect();
        Ok(restricted_ols(&prob, &cols))
    } else {
        Ok(ridge_loo(x, y)?.0)
    }
}

/// `w_j = max(|mu_j|, floor)^(-eta)` with `floor = 1e-4 * max_j |mu_j|`.
pub fn weights_from_pilot(mu: &[f64], eta: f64) -> Vec<f64> {
    let top = mu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(top > 0.0) {
        return vec![1.0; mu.len()];
    }
    let floor = WEIGHT_FLOOR * top;
    mu.iter().map(|m| m.abs().max(floor).powf(-eta)).collect()
}

/// Adaptive-Lasso penalty weights for the columns of `x`.
pub fn adaptive_weights(x: &Matrix, y: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be > 0, got {eta}")));
    }
    Ok(weights_from_pilot(&pilot_coefficients(x, y)?, eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_weights() {
        let w = weights_from_pilot(&[2.0, 0.5], 1.0);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn floor_keeps_weights_finite() {
        let w = weights_from_pilot(&[1.0, 0.0, -1e-9], 1.0);
        assert!(w.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!((w[1] - 1e4).abs() < 1e-6);
    }

    #[test]
    fn ridge_loo_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (n, p) = (15, 20);
        let x = Matrix::from_fn(n, p, |_, _| rng.random::<f64>() - 0.5);
        let y: Vec<f64> = (0..n).map(|i| x[(i, 0)] * 2.0 + rng.random::<f64>()).collect();
        let (beta, k) = ridge_loo(&x, &y).unwrap();
        // Direct solve of the ridge normal equations at the chosen penalty.
        let (xc, yc) = centered(&x, &y).unwrap();
        let a = xc.transpose() * &xc + Matrix::identity(p, p) * k;
        let b = xc.transpose() * DVector::from_column_slice(&yc);
        let direct = a.lu().solve(&b).unwrap();
        for j in 0..p {
            assert!((beta[j] - direct[j]).abs() < 1e-8);
        }
    }
}
