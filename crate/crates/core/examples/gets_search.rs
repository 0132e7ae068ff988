//! General-to-specific selection, first with a forced regressor on an
//! estimable GUM, then block search with more candidates than observations.
//!
//! ```text
//! cargo run --release --example gets_search
//! ```

use pdsel::gets::{block_select, gets_select, GetsConfig};
use pdsel::simlab::{simulate_dataset, DgpConfig};

fn main() -> pdsel::Result<()> {
    let data = simulate_dataset(&DgpConfig::new(400, 60, 0.3, 4.0, 4.0), 5)?;
    for alpha in [0.05, 0.01] {
        let res = gets_select(&data.x, &data.y, &[59], &GetsConfig::new(alpha))?;
        println!(
            "alpha {alpha}: {} selected {:?}, {} paths, {} terminals, forced x60 kept: {}",
            res.selected.len(),
            res.selected,
            res.paths_explored,
            res.terminal_count,
            res.selected.contains(&59)
        );
    }

    let wide = simulate_dataset(&DgpConfig::new(200, 210, 0.0, 4.0, 4.0), 6)?;
    let res = block_select(&wide.x, &wide.y, &[], &GetsConfig::new(0.01))?;
    let hits = res.selected.iter().filter(|&&j| j < 10).count();
    println!(
        "p > n block search: {} selected, {hits} of the 10 relevant, {} paths",
        res.selected.len(),
        res.paths_explored
    );
    Ok(())
}
