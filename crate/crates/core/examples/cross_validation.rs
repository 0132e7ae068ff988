//! Trace a 10-fold cross-validation curve and show where the minimum and
//! one-standard-error rules land.
//!
//! ```text
//! cargo run --release --example cross_validation
//! ```

use pdsel::lasso::{cv_lambda, standardize};
use pdsel::simlab::{simulate_dataset, DgpConfig};

fn main() -> pdsel::Result<()> {
    let data = simulate_dataset(&DgpConfig::new(200, 50, 0.0, 2.5, 4.0), 3)?;
    let (xs, ys, _) = standardize(&data.x, &data.y)?;
    let weights = vec![1.0; xs.ncols()];
    let curve = cv_lambda(&xs, &ys, 10, 100, &weights, 1.0, 11)?;

    for (k, lam) in curve.lambda_grid.iter().enumerate().step_by(10) {
        let mark = if k == curve.index_min {
            "  <- min"
        } else if k == curve.index_1se {
            "  <- 1se"
        } else {
            ""
        };
        println!(
            "lambda {:>10.4}  cv mse {:>8.4} +/- {:.4}{mark}",
            lam, curve.mean_error[k], curve.se_error[k]
        );
    }
    println!(
        "lambda_min = {:.4} (index {}), lambda_1se = {:.4} (index {})",
        curve.lambda_min, curve.index_min, curve.lambda_1se, curve.index_1se
    );
    Ok(())
}
