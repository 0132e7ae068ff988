use nalgebra::DVector;

use super::gram::GramProblem;
use super::{kkt_tol, LassoFit, CD_TOL, MAX_SWEEPS, PATH_TOL, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::numkit::Matrix;

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Stopping rule of [`cd_solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    /// No coefficient moves by more than [`CD_TOL`] and the optimality
    /// conditions hold within half of [`kkt_tol`].
    Exact,
    /// `max_j G_jj dtheta_j^2 < PATH_TOL y'y`, for warm-started grids.
    Path,
}

/// Cyclic coordinate descent on a Gram problem, warm-started from `beta`.
///
/// `pen[j]` is the per-coordinate weight (0 leaves the coordinate
/// unpenalized). Full sweeps alternate with sweeps over the current non-zero
/// set; the solver stops after a full sweep that meets `stop`. Returns `(sweeps, converged)`.
pub(crate) fn cd_solve(
    prob: &GramProblem,
    lambda: f64,
    pen: &[f64],
    mix: f64,
    beta: &mut [f64],
    stop: Stop,
) -> (usize, bool) {
    let p = prob.p();
    let tol = match stop {
        Stop::Exact => CD_TOL,
        Stop::Path => (PATH_TOL * prob.yty).sqrt(),
    };
    let g = prob.xtx.as_slice();
    let l1: Vec<f64> = pen.iter().map(|w| 0.5 * lambda * w * mix).collect();
    let l2: Vec<f64> = pen.iter().map(|w| 0.5 * lambda * w * (1.0 - mix)).collect();
    let all: Vec<usize> = (0..p).collect();
    // c_j = x_j' r, kept exact on the coordinates being swept
    let mut c = vec![0.0; p];

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        c.copy_from_slice(&prob.xty);
        for k in 0..p {
            if beta[k] != 0.0 {
                let col = &g[k * p..(k + 1) * p];
                for (cj, gj) in c.iter_mut().zip(col) {
                    *cj -= gj * beta[k];
                }
            }
        }
        sweeps += 1;
        if sweep(g, p, &all, &all, &l1, &l2, &mut c, beta, stop) < tol
            && (stop == Stop::Path || kkt_gap(&c, &l1, &l2, beta) < 0.5 * kkt_tol(lambda))
        {
            return (sweeps, true);
        }
        let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
        while sweeps < MAX_SWEEPS {
            sweeps += 1;
            if sweep(g, p, &active, &active, &l1, &l2, &mut c, beta, stop) < tol {
                break;
            }
        }
    }
    (MAX_SWEEPS, false)
}

/// Largest violation of the optimality conditions, in units of the
/// objective's gradient, given `c = X'r` current on every coordinate.
fn kkt_gap(c: &[f64], l1: &[f64], l2: &[f64], beta: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..beta.len() {
        let h = l2[j] * beta[j] - c[j];
        let v = if beta[j] != 0.0 {
            (h + l1[j] * beta[j].signum()).abs()
        } else {
            (h.abs() - l1[j]).max(0.0)
        };
        worst = worst.max(2.0 * v);
    }
    worst
}

/// One pass over `coords`, keeping `c` current on `tracked`. Returns the
/// largest change on the scale `stop` measures.
#[allow(clippy::too_many_arguments)]
fn sweep(
    g: &[f64],
    p: usize,
    coords: &[usize],
    tracked: &[usize],
    l1: &[f64],
    l2: &[f64],
    c: &mut [f64],
    beta: &mut [f64],
    stop: Stop,
) -> f64 {
    let full = tracked.len() == p;
    let mut max_change = 0.0f64;
    for &j in coords {
        let gjj = g[j * p + j];
        if gjj <= 0.0 {
            continue;
        }
        let old = beta[j];
        let z = c[j] + gjj * old;
        let new = soft_threshold(z, l1[j]) / (gjj + l2[j]);
        let delta = new - old;
        if delta != 0.0 {
            beta[j] = new;
            let col = &g[j * p..(j + 1) * p];
            if full {
                for (ck, gk) in c.iter_mut().zip(col) {
                    *ck -= gk * delta;
                }
            } else {
                for &k in tracked {
                    c[k] -= col[k] * delta;
                }
            }
            let size = match stop {
                Stop::Exact => delta.abs(),
                Stop::Path => gjj.sqrt() * delta.abs(),
            };
            max_change = max_change.max(size);
        }
    }
    max_change
}

pub(crate) fn penalty_vector(p: usize, weights: &[f64], unpenalized: &[usize]) -> Vec<f64> {
    let mut pen = weights.to_vec();
    pen.resize(p, 1.0);
    for &j in unpenalized {
        pen[j] = 0.0;
    }
    pen
}

/// Least-squares fit restricted to `cols`, as a full-length coefficient vector.
pub(crate) fn restricted_ols(prob: &GramProblem, cols: &[usize]) -> Vec<f64> {
    let p = prob.p();
    let mut beta = vec![0.0; p];
    if cols.is_empty() {
        return beta;
    }
    let k = cols.len();
    let sub = Matrix::from_fn(k, k, |a, b| prob.xtx[(cols[a], cols[b])]);
    let rhs = DVector::from_iterator(k, cols.iter().map(|&j| prob.xty[j]));
    let sol = match sub.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => sub
            .pseudo_inverse(1e-12)
            .map(|pinv| pinv * &rhs)
            .unwrap_or_else(|_| DVector::zeros(k)),
    };
    for (a, &j) in cols.iter().enumerate() {
        beta[j] = sol[a];
    }
    beta
}

/// Smallest penalty at which every penalized coefficient is zero.
pub(crate) fn gram_lambda_max(prob: &GramProblem, pen: &[f64], mix: f64) -> f64 {
    let p = prob.p();
    let unpen: Vec<usize> = (0..p).filter(|&j| pen[j] == 0.0).collect();
    let beta = restricted_ols(prob, &unpen);
    let mut lmax = 0.0f64;
    for j in 0..p {
        if pen[j] == 0.0 {
            continue;
        }
        let mut cj = prob.xty[j];
        for &k in &unpen {
            cj -= prob.xtx[(j, k)] * beta[k];
        }
        lmax = lmax.max(2.0 * cj.abs() / (pen[j] * mix));
    }
    lmax
}

fn check_inputs(
    xs: &Matrix,
    ys: &[f64],
    weights: &[f64],
    mix: f64,
    unpenalized: &[usize],
) -> Result<()> {
    let p = xs.ncols();
    if xs.nrows() != ys.len() {
        return Err(Error::Dimension(format!(
            "X has {} rows, y has {}",
            xs.nrows(),
            ys.len()
        )));
    }
    if weights.len() != p {
        return Err(Error::Dimension(format!(
            "{} weights for {p} columns",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::Domain("penalty weights must be finite and >= 0".into()));
    }
    if !(mix > 0.0 && mix <= 1.0) {
        return Err(Error::Domain(format!("mix must lie in (0, 1], got {mix}")));
    }
    if let Some(&j) = unpenalized.iter().find(|&&j| j >= p) {
        return Err(Error::Dimension(format!("unpenalized column {j} out of range")));
    }
    Ok(())
}

/// Objective value `RSS + lambda * sum_j w_j [mix |t_j| + (1 - mix) t_j^2 / 2]`
/// computed directly from the data.
pub fn lasso_objective(
    xs: &Matrix,
    ys: &[f64],
    theta: &[f64],
    lambda: f64,
    weights: &[f64],
    mix: f64,
    unpenalized: &[usize],
) -> f64 {
    let fitted = xs * DVector::from_column_slice(theta);
    let rss: f64 = ys.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let pen = penalty_vector(xs.ncols(), weights, unpenalized);
    let penalty: f64 = theta
        .iter()
        .zip(&pen)
        .map(|(t, w)| w * (mix * t.abs() + (1.0 - mix) * t * t / 2.0))
        .sum();
    rss + lambda * penalty
}

/// `max_j 2 |x_j' r0| / (w_j mix)` with `r0` the residual after the
/// unpenalized columns.
pub fn lambda_max(
    xs: &Matrix,
    ys: &[f64],
    weights: &[f64],
    mix: f64,
    unpenalized: &[usize],
) -> Result<f64> {
    check_inputs(xs, ys, weights, mix, unpenalized)?;
    let prob = GramProblem::from_data(xs, ys)?;
    let pen = penalty_vector(xs.ncols(), weights, unpenalized);
    Ok(gram_lambda_max(&prob, &pen, mix))
}

/// Minimise the weighted elastic-net objective on the given (standardized)
/// design, cold-started at zero. A fit that hits the sweep limit is returned
/// with `converged = false`.
pub fn coordinate_descent(
    xs: &Matrix,
    ys: &[f64],
    lambda: f64,
    weights: &[f64],
    mix: f64,
    unpenalized: &[usize],
) -> Result<LassoFit> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    check_inputs(xs, ys, weights, mix, unpenalized)?;
    let prob = GramProblem::from_data(xs, ys)?;
    let pen = penalty_vector(xs.ncols(), weights, unpenalized);
    let mut beta = vec![0.0; xs.ncols()];
    let (sweeps, converged) = cd_solve(&prob, lambda, &pen, mix, &mut beta, Stop::Exact);
    Ok(LassoFit {
        support: support_of(&beta),
        coefficients: beta,
        intercept: 0.0,
        lambda_used: lambda,
        n_iterations: sweeps,
        converged,
    })
}

pub(crate) fn support_of(beta: &[f64]) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > SUPPORT_TOL)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_soft_threshold() {
        // unit-norm column with x'y = 1: argmin (y - xb)^2 + 0.5|b| = S(1, 0.25)
        let x = Matrix::from_column_slice(2, 1, &[0.6, 0.8]);
        let y = [0.6, 0.8];
        let fit = coordinate_descent(&x, &y, 0.5, &[1.0], 1.0, &[]).unwrap();
        assert!((fit.coefficients[0] - 0.75).abs() < 1e-12);
        assert!(fit.converged);
    }

    #[test]
    fn ridge_part_shrinks_proportionally() {
        let x = Matrix::from_column_slice(2, 1, &[0.6, 0.8]);
        let y = [0.6, 0.8];
        // mix = 0.5, lambda = 1: S(1, 0.25) / (1 + 0.25)
        let fit = coordinate_descent(&x, &y, 1.0, &[1.0], 0.5, &[]).unwrap();
        assert!((fit.coefficients[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn negative_lambda_is_rejected() {
        let x = Matrix::from_column_slice(2, 1, &[0.6, 0.8]);
        assert!(matches!(
            coordinate_descent(&x, &[1.0, 0.0], -1.0, &[1.0], 1.0, &[]),
            Err(Error::Domain(_))
        ));
    }

    fn random_problem(n: usize, p: usize, seed: u64) -> (Matrix, Vec<f64>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = Matrix::from_fn(n, p, |_, _| rng.random::<f64>() - 0.5);
        let y = (0..n)
            .map(|i| x[(i, 0)] * 3.0 - x[(i, 1)] + rng.random::<f64>() - 0.5)
            .collect();
        (x, y)
    }

    #[test]
    fn objective_never_increases_across_sweeps() {
        for seed in 0..20 {
            let (x, y) = random_problem(40, 12, seed);
            let prob = GramProblem::from_data(&x, &y).unwrap();
            let w = vec![1.0; 12];
            let pen = penalty_vector(12, &w, &[]);
            let lambda = 0.1 * gram_lambda_max(&prob, &pen, 0.7);
            let l1: Vec<f64> = pen.iter().map(|w| 0.5 * lambda * w * 0.7).collect();
            let l2: Vec<f64> = pen.iter().map(|w| 0.5 * lambda * w * 0.3).collect();
            let all: Vec<usize> = (0..12).collect();
            let mut beta = vec![0.0; 12];
            let mut c = prob.xty.clone();
            let mut last = lasso_objective(&x, &y, &beta, lambda, &w, 0.7, &[]);
            for _ in 0..50 {
                sweep(prob.xtx.as_slice(), 12, &all, &all, &l1, &l2, &mut c, &mut beta, Stop::Exact);
                let obj = lasso_objective(&x, &y, &beta, lambda, &w, 0.7, &[]);
                assert!(obj <= last * (1.0 + 1e-12), "seed {seed}: {obj} > {last}");
                last = obj;
            }
        }
    }

    #[test]
    fn warm_path_supports_match_cold_fits() {
        for seed in 0..10 {
            let (x, y) = random_problem(60, 25, seed);
            let prob = GramProblem::from_data(&x, &y).unwrap();
            let w = vec![1.0; 25];
            let pen = penalty_vector(25, &w, &[]);
            let lmax = gram_lambda_max(&prob, &pen, 1.0);
            let mut warm = vec![0.0; 25];
            for k in 0..100 {
                let lambda = lmax * (1e-4f64).powf(k as f64 / 99.0);
                cd_solve(&prob, lambda, &pen, 1.0, &mut warm, Stop::Exact);
                let cold = coordinate_descent(&x, &y, lambda, &w, 1.0, &[]).unwrap();
                assert_eq!(support_of(&warm), cold.support, "seed {seed}, grid point {k}");
            }
        }
    }
}
