use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Dataset, Truth};
use crate::numkit::{toeplitz_cov, Matrix};

/// Design of `y = X beta + d delta + eps`, `d = X gamma + eta` with
/// `X ~ N(0, Sigma_X)`, `Sigma_X[k, l] = rho^|k - l|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    #[serde(default = "one")]
    pub sigma2_eps: f64,
    #[serde(default = "one")]
    pub sigma2_eta: f64,
    pub psi_y: f64,
    pub psi_d: f64,
    /// The first `n_relevant` columns carry non-zero coefficients.
    #[serde(default = "ten")]
    pub n_relevant: usize,
    #[serde(default)]
    pub delta: f64,
}

fn one() -> f64 {
    1.0
}
fn ten() -> usize {
    10
}

impl DgpConfig {
    /// Unit variances, ten relevant controls and `delta = 0`.
    pub fn new(n: usize, p: usize, rho: f64, psi_y: f64, psi_d: f64) -> Self {
        DgpConfig {
            n,
            p,
            rho,
            sigma2_eps: 1.0,
            sigma2_eta: 1.0,
            psi_y,
            psi_d,
            n_relevant: 10,
            delta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p == 0 {
            return Err(Error::Config(format!(
                "need n >= 2 and p >= 1, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.n_relevant > self.p {
            return Err(Error::Config(format!(
                "n_relevant = {} exceeds p = {}",
                self.n_relevant, self.p
            )));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::Config(format!("rho must lie in (-1, 1), got {}", self.rho)));
        }
        if !(self.sigma2_eps >= 0.0 && self.sigma2_eta > 0.0) {
            return Err(Error::Config("error variances must be positive".into()));
        }
        if ![self.psi_y, self.psi_d, self.delta].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("psi and delta must be finite".into()));
        }
        Ok(())
    }
}

/// Calibrated coefficients and the covariances they were derived from.
#[derive(Clone, Debug)]
pub struct Calibration {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma_x: Matrix,
    /// Covariance of `(X, d)`, `d` last.
    pub sigma_z: Matrix,
}

fn inverse_diagonal(m: &Matrix) -> Result<Vec<f64>> {
    let inv = Cholesky::new(m.clone())
        .ok_or_else(|| Error::Degenerate("covariance matrix is not positive definite".into()))?
        .inverse();
    Ok(inv.diagonal().iter().copied().collect())
}

/// Coefficients whose expected OLS t-statistics equal `psi_d` (treatment
/// equation) and `psi_y` (outcome equation on `(X, d)`).
pub fn calibrate_coefficients(config: &DgpConfig) -> Result<Calibration> {
    config.validate()?;
    let (n, p, k) = (config.n as f64, config.p, config.n_relevant);
    let sigma_x = toeplitz_cov(config.rho, p)?;
    let dx = inverse_diagonal(&sigma_x)?;
    let gamma: Vec<f64> = (0..p)
        .map(|j| {
            if j < k {
                config.psi_d * (config.sigma2_eta * dx[j] / n).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let g = nalgebra::DVector::from_column_slice(&gamma);
    let sg = &sigma_x * &g;
    let mut sigma_z = Matrix::zeros(p + 1, p + 1);
    sigma_z.view_mut((0, 0), (p, p)).copy_from(&sigma_x);
    for j in 0..p {
        sigma_z[(j, p)] = sg[j];
        sigma_z[(p, j)] = sg[j];
    }
    sigma_z[(p, p)] = g.dot(&sg) + config.sigma2_eta;
    let dz = inverse_diagonal(&sigma_z)?;
    let beta: Vec<f64> = (0..p)
        .map(|j| {
            if j < k {
                config.psi_y * (config.sigma2_eps * dz[j] / n).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(Calibration {
        beta,
        gamma,
        sigma_x,
        sigma_z,
    })
}

/// Reusable sampler for one configuration (the factorization is done once).
#[derive(Clone, Debug)]
pub struct Simulator {
    config: DgpConfig,
    calibration: Calibration,
    chol_t: Matrix,
}

impl Simulator {
    pub fn new(config: &DgpConfig) -> Result<Self> {
        let calibration = calibrate_coefficients(config)?;
        let l = Cholesky::new(calibration.sigma_x.clone())
            .ok_or_else(|| Error::Degenerate("Sigma_X is not positive definite".into()))?
            .l();
        Ok(Simulator {
            config: config.clone(),
            calibration,
            chol_t: l.transpose(),
        })
    }

    pub fn calibration(&self) -> &Calibration {
        &self.calibration
    }

    pub fn config(&self) -> &DgpConfig {
        &self.config
    }

    /// Draw one dataset; the same seed always yields the same data.
    pub fn draw(&self, seed: u64) -> Dataset {
        let c = &self.config;
        let (n, p) = (c.n, c.p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = Matrix::zeros(n, p);
        for i in 0..n {
            for j in 0..p {
                z[(i, j)] = StandardNormal.sample(&mut rng);
            }
        }
        let x = z * &self.chol_t;
        let (se, sd) = (c.sigma2_eps.sqrt(), c.sigma2_eta.sqrt());
        let cal = &self.calibration;
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let xs = x.as_slice();
        for i in 0..n {
            let eta: f64 = StandardNormal.sample(&mut rng);
            let eps: f64 = StandardNormal.sample(&mut rng);
            let (mut xg, mut xb) = (0.0, 0.0);
            for j in 0..c.n_relevant {
                let v = xs[j * n + i];
                xg += v * cal.gamma[j];
                xb += v * cal.beta[j];
            }
            d[i] = xg + sd * eta;
            y[i] = xb + c.delta * d[i] + se * eps;
        }
        let names = (1..=p).map(|j| format!("x{j}")).collect();
        Dataset {
            y,
            d,
            x,
            names,
            truth: Some(Truth {
                beta: cal.beta.clone(),
                gamma: cal.gamma.clone(),
                delta: c.delta,
                relevant: (0..c.n_relevant).collect(),
            }),
        }
    }
}

/// One draw of the design.
pub fn simulate_dataset(config: &DgpConfig, seed: u64) -> Result<Dataset> {
    Ok(Simulator::new(config)?.draw(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_design_gamma() {
        let c = DgpConfig::new(400, 20, 0.0, 2.5, 4.0);
        let cal = calibrate_coefficients(&c).unwrap();
        for j in 0..10 {
            assert!((cal.gamma[j] - 0.2).abs() < 1e-12);
        }
        assert!(cal.gamma[10..].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn zero_psi_gives_zero_coefficients() {
        let cal = calibrate_coefficients(&DgpConfig::new(100, 15, 0.5, 0.0, 0.0)).unwrap();
        assert!(cal.beta.iter().chain(&cal.gamma).all(|&v| v == 0.0));
    }

    #[test]
    fn noiseless_outcome_equals_treatment() {
        let mut c = DgpConfig::new(50, 12, 0.3, 0.0, 4.0);
        c.sigma2_eps = 0.0;
        c.delta = 1.0;
        let data = simulate_dataset(&c, 3).unwrap();
        assert_eq!(data.y, data.d);
        assert_eq!((data.x.nrows(), data.x.ncols()), (50, 12));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = DgpConfig::new(50, 5, 0.3, 1.0, 1.0);
        assert!(c.validate().is_err());
        c.n_relevant = 5;
        c.rho = 1.0;
        assert!(c.validate().is_err());
    }
}
