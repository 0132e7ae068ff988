//! Sweep the covariate correlation and write the long-format table that
//! the plotting scripts consume.
//!
//! ```text
//! cargo run --release --example experiment_grid -- grid.csv
//! ```

use pdsel::estimators::MethodSpec;
use pdsel::lasso::PenaltySpec;
use pdsel::simlab::{experiment_grid, write_long_csv, DgpConfig, LongRow};

fn main() -> pdsel::Result<()> {
    let methods = [
        MethodSpec::post_double_lasso(PenaltySpec::cv_min()),
        MethodSpec::post_double_autometrics(0.05),
    ];
    let base = DgpConfig::new(400, 210, 0.0, 2.5, 4.0);
    let cells = experiment_grid(&base, &[-0.9, 0.0, 0.9], &[4.0], &methods, 5, 1)?;
    let rows = LongRow::from_cells(&cells);
    for r in &rows {
        println!("rho {:>5.2}  {:<8} bias {:>8.4}  rmse {:.4}", r.rho, r.method, r.bias, r.rmse);
    }
    if let Some(path) = std::env::args().nth(1) {
        let file = std::fs::File::create(&path).map_err(|e| pdsel::Error::Io {
            path: path.clone().into(),
            source: e,
        })?;
        write_long_csv(file, &rows)?;
        println!("wrote {path}");
    }
    Ok(())
}
