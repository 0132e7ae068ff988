//! Fit one Lasso outcome equation under every penalty rule and compare the
//! selected supports.
//!
//! ```text
//! cargo run --release --example lasso_penalties
//! ```

use pdsel::lasso::{adaptive_weights, select_lasso, Mix, PenaltySpec};
use pdsel::simlab::{simulate_dataset, DgpConfig};

fn main() -> pdsel::Result<()> {
    let data = simulate_dataset(&DgpConfig::new(400, 210, 0.5, 2.5, 4.0), 7)?;
    let relevant: Vec<usize> = (0..10).collect();
    let weights = adaptive_weights(&data.x, &data.y, 1.0)?;

    let rules = [
        ("fixed 0.05", PenaltySpec::fixed(0.05), None),
        ("bya", PenaltySpec::bya(), None),
        ("bcch", PenaltySpec::bcch(), None),
        ("cv min", PenaltySpec::cv_min(), None),
        ("cv 1se", PenaltySpec::cv_1se(), None),
        ("adaptive min", PenaltySpec::cv_min(), Some(weights.as_slice())),
        (
            "elastic net",
            PenaltySpec::cv_min().with_mix(Mix::CrossValidated),
            None,
        ),
    ];
    println!("{:<14} {:>10} {:>5} {:>8} {:>6}", "rule", "lambda", "mix", "support", "hits");
    for (name, spec, w) in rules {
        let sel = select_lasso(&data.x, &data.y, &[], &spec, w, 1)?;
        let hits = sel.fit.support.iter().filter(|j| relevant.contains(j)).count();
        println!(
            "{:<14} {:>10.5} {:>5.2} {:>8} {:>6}",
            name,
            sel.lambda,
            sel.mix,
            sel.fit.support.len(),
            hits
        );
    }
    Ok(())
}
