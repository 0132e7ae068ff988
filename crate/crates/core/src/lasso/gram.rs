//! Sufficient statistics for least-squares problems.
//!
//! Solvers work on `X'X`, `X'y` and `y'y`; cross-validation folds subtract
//! held-out moments from the full-sample ones instead of recomputing them.

use crate::error::Result;
use crate::numkit::Matrix;

/// Raw (uncentred) first and second moments of `(X, y)`.
#[derive(Clone, Debug)]
pub(crate) struct Moments {
    pub n: usize,
    pub sx: Vec<f64>,
    pub sy: f64,
    pub sxx: Matrix,
    pub sxy: Vec<f64>,
    pub syy: f64,
}

impl Moments {
    pub fn from_data(x: &Matrix, y: &[f64]) -> Self {
        let p = x.ncols();
        let sx = (0..p).map(|j| x.column(j).sum()).collect();
        let sxy = (0..p)
            .map(|j| x.column(j).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect();
        Moments {
            n: x.nrows(),
            sx,
            sy: y.iter().sum(),
            sxx: x.tr_mul(x),
            sxy,
            syy: y.iter().map(|v| v * v).sum(),
        }
    }

    pub fn from_rows(x: &Matrix, y: &[f64], rows: &[usize]) -> Self {
        let sub = Matrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)]);
        let ys: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
        Self::from_data(&sub, &ys)
    }

    pub fn minus(&self, other: &Moments) -> Moments {
        Moments {
            n: self.n - other.n,
            sx: self.sx.iter().zip(&other.sx).map(|(a, b)| a - b).collect(),
            sy: self.sy - other.sy,
            sxx: &self.sxx - &other.sxx,
            sxy: self.sxy.iter().zip(&other.sxy).map(|(a, b)| a - b).collect(),
            syy: self.syy - other.syy,
        }
    }

    pub fn y_variance(&self) -> f64 {
        let n = self.n as f64;
        (self.syy - self.sy * self.sy / n) / (n - 1.0)
    }

    /// Centre and scale to sample sd 1. Columns without variation get scale 1
    /// and a zero row/column in the Gram matrix, so they never enter a fit.
    pub fn standardized(&self) -> Standardized {
        let n = self.n as f64;
        let p = self.sx.len();
        let means: Vec<f64> = self.sx.iter().map(|s| s / n).collect();
        let ymean = self.sy / n;
        let mut scales = vec![1.0; p];
        let mut live = vec![true; p];
        for j in 0..p {
            let var = (self.sxx[(j, j)] - n * means[j] * means[j]) / (n - 1.0);
            let tol = 1e-12 * (self.sxx[(j, j)] / n).max(f64::MIN_POSITIVE);
            if var > tol {
                scales[j] = var.sqrt();
            } else {
                live[j] = false;
            }
        }
        let mut xtx = Matrix::zeros(p, p);
        for k in 0..p {
            for j in 0..p {
                if live[j] && live[k] {
                    xtx[(j, k)] = (self.sxx[(j, k)] - n * means[j] * means[k])
                        / (scales[j] * scales[k]);
                }
            }
        }
        let xty = (0..p)
            .map(|j| {
                if live[j] {
                    (self.sxy[j] - n * means[j] * ymean) / scales[j]
                } else {
                    0.0
                }
            })
            .collect();
        let yty = self.syy - n * ymean * ymean;
        Standardized {
            gram: GramProblem {
                xtx,
                xty,
                yty,
            },
            means,
            scales,
            ymean,
        }
    }
}

pub(crate) struct Standardized {
    pub gram: GramProblem,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub ymean: f64,
}

/// `X'X`, `X'y`, `y'y` of an (already centred) least-squares problem.
#[derive(Clone, Debug)]
pub(crate) struct GramProblem {
    pub xtx: Matrix,
    pub xty: Vec<f64>,
    pub yty: f64,
}

impl GramProblem {
    pub fn from_data(x: &Matrix, y: &[f64]) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(crate::Error::Dimension(format!(
                "X has {} rows, y has {}",
                x.nrows(),
                y.len()
            )));
        }
        let m = Moments::from_data(x, y);
        Ok(GramProblem {
            xtx: m.sxx,
            xty: m.sxy,
            yty: m.syy,
        })
    }

    pub fn p(&self) -> usize {
        self.xty.len()
    }
}
