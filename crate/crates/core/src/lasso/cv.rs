use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cd::{cd_solve, Stop, gram_lambda_max, penalty_vector};
use super::gram::{GramProblem, Moments};
use super::CvCurve;
use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Cross-validation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub grid_size: usize,
    /// Smallest grid value relative to `lambda_max`; `None` picks 1e-4 when
    /// p < n and 1e-2 otherwise.
    pub grid_ratio: Option<f64>,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 10,
            grid_size: 100,
            grid_ratio: None,
        }
    }
}

/// `size` log-spaced values from `max` down to `max * ratio`.
pub fn log_grid(max: f64, ratio: f64, size: usize) -> Vec<f64> {
    if size == 1 {
        return vec![max];
    }
    let step = ratio.ln() / (size - 1) as f64;
    (0..size).map(|i| max * (step * i as f64).exp()).collect()
}

pub(crate) fn fold_ids(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut ids = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        ids[i] = pos % folds;
    }
    ids
}

struct Fold {
    train: GramProblem,
    /// Held-out rows standardized with the training means and scales.
    test_x: Matrix,
    /// Held-out outcomes centred on the training mean.
    test_y: Vec<f64>,
}

/// Per-fold training problems shared by every penalty grid evaluated on them.
pub(crate) struct CvFolds {
    folds: Vec<Fold>,
    full: GramProblem,
}

impl CvFolds {
    pub fn new(xs: &Matrix, ys: &[f64], folds: usize, seed: u64) -> Result<Self> {
        let n = xs.nrows();
        if n != ys.len() {
            return Err(Error::Dimension(format!("X has {n} rows, y has {}", ys.len())));
        }
        if folds < 2 || n < 2 * folds {
            return Err(Error::Domain(format!(
                "need folds >= 2 and n >= 2 * folds (n = {n}, folds = {folds})"
            )));
        }
        let ids = fold_ids(n, folds, seed);
        let full_m = Moments::from_data(xs, ys);
        let full = full_m.standardized().gram;
        let mut out = Vec::with_capacity(folds);
        for k in 0..folds {
            let rows: Vec<usize> = (0..n).filter(|&i| ids[i] == k).collect();
            let held = Moments::from_rows(xs, ys, &rows);
            let train_m = full_m.minus(&held);
            if !(train_m.y_variance() > 1e-14 * (train_m.syy / train_m.n as f64).max(1e-300)) {
                return Err(Error::FoldDegenerate { fold: k });
            }
            let st = train_m.standardized();
            let test_x = Matrix::from_fn(rows.len(), xs.ncols(), |i, j| {
                (xs[(rows[i], j)] - st.means[j]) / st.scales[j]
            });
            let test_y = rows.iter().map(|&i| ys[i] - st.ymean).collect();
            out.push(Fold {
                train: st.gram,
                test_x,
                test_y,
            });
        }
        Ok(CvFolds {
            folds: out,
            full,
        })
    }

    pub fn lambda_max(&self, pen: &[f64], mix: f64) -> f64 {
        gram_lambda_max(&self.full, pen, mix)
    }

    /// Mean and standard error of held-out MSE along a descending grid,
    /// warm-starting each fold's path.
    pub fn curve(&self, grid: &[f64], pen: &[f64], mix: f64) -> CvCurve {
        let g = grid.len();
        let mut errs = vec![vec![0.0; self.folds.len()]; g];
        for (k, fold) in self.folds.iter().enumerate() {
            let p = fold.train.p();
            let mut beta = vec![0.0; p];
            for (i, &lam) in grid.iter().enumerate() {
                cd_solve(&fold.train, lam, pen, mix, &mut beta, Stop::Path);
                let mut sse = 0.0;
                for (r, yv) in fold.test_y.iter().enumerate() {
                    let mut pred = 0.0;
                    for (j, b) in beta.iter().enumerate() {
                        if *b != 0.0 {
                            pred += fold.test_x[(r, j)] * b;
                        }
                    }
                    sse += (yv - pred).powi(2);
                }
                errs[i][k] = sse / fold.test_y.len() as f64;
            }
        }
        summarize(grid, &errs)
    }
}

fn summarize(grid: &[f64], errs: &[Vec<f64>]) -> CvCurve {
    let k = errs[0].len() as f64;
    let mut mean_error = Vec::with_capacity(grid.len());
    let mut se_error = Vec::with_capacity(grid.len());
    for e in errs {
        let m = e.iter().sum::<f64>() / k;
        let var = e.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0);
        mean_error.push(m);
        se_error.push((var / k).sqrt());
    }
    let mut index_min = 0;
    for i in 1..grid.len() {
        if mean_error[i] < mean_error[index_min] {
            index_min = i;
        }
    }
    let bound = mean_error[index_min] + se_error[index_min];
    let index_1se = (0..=index_min)
        .find(|&i| mean_error[i] <= bound)
        .unwrap_or(index_min);
    CvCurve {
        lambda_grid: grid.to_vec(),
        mean_error,
        se_error,
        lambda_min: grid[index_min],
        lambda_1se: grid[index_1se],
        index_min,
        index_1se,
    }
}

pub(crate) fn default_ratio(n: usize, p: usize) -> f64 {
    if p < n {
        1e-4
    } else {
        1e-2
    }
}

/// K-fold CV over a log-spaced grid with the treatment of `unpenalized`
/// columns and custom grid settings.
pub fn cv_lambda_with(
    xs: &Matrix,
    ys: &[f64],
    weights: &[f64],
    mix: f64,
    unpenalized: &[usize],
    opts: &CvOptions,
    seed: u64,
) -> Result<CvCurve> {
    if weights.len() != xs.ncols() {
        return Err(Error::Dimension(format!(
            "{} weights for {} columns",
            weights.len(),
            xs.ncols()
        )));
    }
    if opts.grid_size == 0 {
        return Err(Error::Domain("grid_size must be positive".into()));
    }
    let folds = CvFolds::new(xs, ys, opts.folds, seed)?;
    let pen = penalty_vector(xs.ncols(), weights, unpenalized);
    let lmax = folds.lambda_max(&pen, mix);
    if !(lmax > 0.0) {
        return Err(Error::Degenerate("outcome is orthogonal to every penalized column".into()));
    }
    let ratio = opts
        .grid_ratio
        .unwrap_or_else(|| default_ratio(xs.nrows(), xs.ncols()));
    let grid = log_grid(lmax, ratio, opts.grid_size);
    Ok(folds.curve(&grid, &pen, mix))
}

/// K-fold CV over `grid_size` log-spaced penalties from `lambda_max` down.
pub fn cv_lambda(
    xs: &Matrix,
    ys: &[f64],
    folds: usize,
    grid_size: usize,
    weights: &[f64],
    mix: f64,
    seed: u64,
) -> Result<CvCurve> {
    let opts = CvOptions {
        folds,
        grid_size,
        grid_ratio: None,
    };
    cv_lambda_with(xs, ys, weights, mix, &[], &opts, seed)
}
