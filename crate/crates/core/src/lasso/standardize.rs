use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Column centring/scaling applied by [`standardize`], sufficient to map
/// standardized coefficients back to the original scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    pub means: Vec<f64>,
    /// Sample standard deviations (n - 1 denominator).
    pub scales: Vec<f64>,
    pub y_mean: f64,
}

impl Transform {
    /// Original-scale slopes and intercept from standardized slopes.
    pub fn coefficients(&self, standardized: &[f64]) -> (Vec<f64>, f64) {
        let slopes: Vec<f64> = standardized
            .iter()
            .zip(&self.scales)
            .map(|(b, s)| b / s)
            .collect();
        let intercept = self.y_mean
            - slopes
                .iter()
                .zip(&self.means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        (slopes, intercept)
    }

    /// Standardize new rows with the stored means and scales.
    pub fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            let (m, s) = (self.means[j], self.scales[j]);
            col.apply(|v| *v = (*v - m) / s);
        }
        out
    }
}

/// Centre and scale every column to mean 0 / sample sd 1 and centre `y`.
pub fn standardize(x: &Matrix, y: &[f64]) -> Result<(Matrix, Vec<f64>, Transform)> {
    let (n, p) = x.shape();
    if n != y.len() {
        return Err(Error::Dimension(format!("X has {n} rows, y has {}", y.len())));
    }
    if n < 2 {
        return Err(Error::Dimension("need at least two observations".into()));
    }
    let mut xs = x.clone();
    let mut means = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    for (j, mut col) in xs.column_iter_mut().enumerate() {
        let m = col.iter().sum::<f64>() / n as f64;
        let ss: f64 = col.iter().map(|v| (v - m) * (v - m)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        let mag = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(sd > 1e-12 * mag) || sd == 0.0 {
            return Err(Error::ConstantColumn { column: j });
        }
        col.apply(|v| *v = (*v - m) / sd);
        means.push(m);
        scales.push(sd);
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let ys = y.iter().map(|v| v - y_mean).collect();
    Ok((
        xs,
        ys,
        Transform {
            means,
            scales,
            y_mean,
        },
    ))
}
