//! The numerical toolkit on its own: Toeplitz covariance, OLS with HC1
//! standard errors and the residual diagnostics GETS relies on.
//!
//! ```text
//! cargo run --release --example ols_diagnostics
//! ```

use pdsel::numkit::{design_with_intercept, hetero_test, normality_test, ols_fit, toeplitz_cov, Robust};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> pdsel::Result<()> {
    println!("Toeplitz(0.5), 4x4:\n{}", toeplitz_cov(0.5, 4)?);

    let n = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    // Error variance grows with |x|.
    let y: Vec<f64> = x
        .iter()
        .map(|&v| {
            let e: f64 = StandardNormal.sample(&mut rng);
            1.0 + 2.0 * v + (0.5 + v.abs()) * e
        })
        .collect();
    let design = design_with_intercept(n, &[&x]);
    let classic = ols_fit(&design, &y, Robust::None)?;
    let hc1 = ols_fit(&design, &y, Robust::Hc1)?;
    println!(
        "slope {:.4}: classical se {:.4}, HC1 se {:.4}",
        hc1.coefficients[1],
        classic.se(1),
        hc1.se(1)
    );
    let jb = normality_test(&hc1.residuals)?;
    // Regress squared residuals on x and x^2 (the intercept is added).
    let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let aux = pdsel::Matrix::from_fn(n, 2, |i, j| if j == 0 { x[i] } else { x2[i] });
    let bp = hetero_test(&hc1.residuals, &aux)?;
    println!("Jarque-Bera {:.2} (p = {:.3})", jb.statistic, jb.pvalue);
    println!("Breusch-Pagan {:.2} (p = {:.3})", bp.statistic, bp.pvalue);
    Ok(())
}
