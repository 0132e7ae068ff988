//! Estimate the treatment effect on one simulated sample with every
//! estimator family, reusing selections through a workspace.
//!
//! ```text
//! cargo run --release --example double_selection
//! ```

use pdsel::estimators::{MethodSpec, Workspace};
use pdsel::lasso::PenaltySpec;
use pdsel::simlab::{simulate_dataset, DgpConfig};

fn main() -> pdsel::Result<()> {
    let mut cfg = DgpConfig::new(400, 210, 0.6, 2.5, 4.0);
    cfg.delta = 0.5;
    let data = simulate_dataset(&cfg, 2024)?;
    let methods = [
        MethodSpec::ols_none(),
        MethodSpec::ols_all(),
        MethodSpec::post_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_lasso(PenaltySpec::bcch()),
        MethodSpec::post_double_adaptive_lasso(PenaltySpec::cv_1se()),
        MethodSpec::autometrics(0.05),
        MethodSpec::post_double_autometrics(0.05),
    ];
    let mut ws = Workspace::new(&data, 99);
    println!("true delta = {}", cfg.delta);
    for m in &methods {
        let e = ws.estimate(m)?;
        println!(
            "{:<10} delta_hat {:>8.4}  se {:.4}  90% CI [{:>7.4}, {:>7.4}]  k* {}",
            m.label(),
            e.delta_hat,
            e.se,
            e.ci.low,
            e.ci.high,
            e.k_star
        );
    }
    Ok(())
}
