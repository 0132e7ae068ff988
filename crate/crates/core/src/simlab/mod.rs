//! Monte Carlo laboratory: Gaussian designs with Toeplitz covariance,
//! non-centrality calibration of the coefficients, a parallel replication
//! driver and long-format reports.

mod dgp;
mod montecarlo;
mod table;

pub use crate::estimators::{Dataset, Truth};
pub use dgp::{calibrate_coefficients, simulate_dataset, Calibration, DgpConfig, Simulator};
pub use montecarlo::{
    experiment_grid, run_monte_carlo, run_replications, summarize, Draw, GridCell, McReport,
    MethodStats,
};
pub use table::{read_long_csv, write_long_csv, LongRow};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE5_E9B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `(a, b)` under `master`. Distinct keys give unrelated
/// seeds, so replications can be evaluated in any order.
pub fn substream(master: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ a) ^ b.rotate_left(32))
}
