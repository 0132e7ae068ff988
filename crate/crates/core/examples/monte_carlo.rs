//! A small Monte Carlo on the baseline design: bias, RMSE, potency and
//! gauge with their Monte Carlo standard errors.
//!
//! ```text
//! cargo run --release --example monte_carlo -- 50
//! ```

use pdsel::estimators::MethodSpec;
use pdsel::lasso::PenaltySpec;
use pdsel::simlab::{run_monte_carlo, DgpConfig};

fn main() -> pdsel::Result<()> {
    let reps = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let methods = [
        MethodSpec::ols_all(),
        MethodSpec::post_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_lasso(PenaltySpec::bya()),
        MethodSpec::post_double_autometrics(0.05),
    ];
    let report = run_monte_carlo(&DgpConfig::new(400, 210, 0.0, 2.5, 4.0), &methods, reps, 42)?;
    println!("R = {}", report.reps);
    for m in &report.methods {
        println!(
            "{:<10} bias {:>8.4} ({:.4})  rmse {:.4}  potency {:.3}  gauge {:.3}  failures {}",
            m.method, m.bias, m.mc_se_bias, m.rmse, m.potency, m.gauge, m.failures
        );
    }
    Ok(())
}
