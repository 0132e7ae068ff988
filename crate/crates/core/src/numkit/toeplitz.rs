use super::Matrix;
use crate::error::{Error, Result};

/// `p x p` Toeplitz correlation matrix with entry `(k, l) = rho^|k - l|`.
pub fn toeplitz_cov(rho: f64, p: usize) -> Result<Matrix> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| must be < 1, got {rho}")));
    }
    if p == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let powers: Vec<f64> = (0..p as i32).map(|k| rho.powi(k)).collect();
    let mut m = Matrix::zeros(p, p);
    for k in 0..p {
        for l in 0..=k {
            let v = powers[k - l];
            m[(k, l)] = v;
            m[(l, k)] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_correlation_is_identity() {
        assert_eq!(toeplitz_cov(0.0, 3).unwrap(), Matrix::identity(3, 3));
    }

    #[test]
    fn half_correlation_entries() {
        let m = toeplitz_cov(0.5, 3).unwrap();
        let want = Matrix::from_row_slice(3, 3, &[1.0, 0.5, 0.25, 0.5, 1.0, 0.5, 0.25, 0.5, 1.0]);
        assert_eq!(m, want);
    }

    #[test]
    fn strong_negative_correlation_stays_positive_definite() {
        let m = toeplitz_cov(-0.9, 50).unwrap();
        let eig = m.symmetric_eigen();
        let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        // AR(1) spectrum lower bound (1 - |rho|) / (1 + |rho|)
        assert!(min > 0.0 && min >= (0.1 / 1.9) * (1.0 - 1e-9), "{min}");
    }

    #[test]
    fn rejects_unit_correlation() {
        assert!(matches!(toeplitz_cov(1.0, 3), Err(Error::Domain(_))));
        assert!(matches!(toeplitz_cov(-1.2, 3), Err(Error::Domain(_))));
    }
}
