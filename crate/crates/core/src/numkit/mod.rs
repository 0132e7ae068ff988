//! Dense linear-algebra and classical-inference kernel.
//!
//! OLS with plain or HC1 covariance, the Jarque–Bera / Breusch–Pagan
//! diagnostic pair, the nested-model F test and Toeplitz covariance
//! construction. Everything here is a pure function of its inputs.

mod diagnostics;
pub mod dist;
mod ols;
mod toeplitz;

pub use diagnostics::{
    breusch_pagan_from_moments, encompassing_f_test, f_test_from_rss, hetero_test,
    jarque_bera_from_moments, normality_test, TestResult,
};
pub use ols::{check_full_rank, ols_fit, rank_tolerance, FitSummary, Robust};
pub use toeplitz::toeplitz_cov;

/// Dense real matrix. Storage is column-major (`nalgebra`).
pub type Matrix = nalgebra::DMatrix<f64>;

/// Build a design `[1, columns...]` from column slices.
pub fn design_with_intercept(n: usize, columns: &[&[f64]]) -> Matrix {
    let mut m = Matrix::zeros(n, columns.len() + 1);
    m.column_mut(0).fill(1.0);
    for (j, col) in columns.iter().enumerate() {
        debug_assert_eq!(col.len(), n);
        m.column_mut(j + 1).copy_from_slice(col);
    }
    m
}

/// Copy the listed columns of `x` into a new matrix.
pub fn select_columns(x: &Matrix, cols: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(x.nrows(), cols.len());
    for (k, &j) in cols.iter().enumerate() {
        out.column_mut(k).copy_from(&x.column(j));
    }
    out
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
