#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use pdsel::cli::{CONTROLS, OUTCOME, TREATMENT};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Growth-schema CSV with `rows` synthetic countries. With `shuffle`, the
/// same values are written with columns and rows in a random order.
pub fn write_growth_csv(path: &Path, seed: u64, rows: usize, shuffle: Option<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<&str> = [OUTCOME, TREATMENT].into_iter().chain(CONTROLS).collect();
    let mut table: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            let z: Vec<f64> = (0..CONTROLS.len()).map(|_| rng.sample(StandardNormal)).collect();
            let d = 0.6 * z[0] + 0.4 * rng.sample::<f64, _>(StandardNormal);
            let y = 0.03 * z[1] - 0.02 * z[0] - 0.01 * d + 0.05 * rng.sample::<f64, _>(StandardNormal);
            [y, d].into_iter().chain(z).collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..names.len()).collect();
    if let Some(s) = shuffle {
        let mut r = ChaCha8Rng::seed_from_u64(s);
        order.shuffle(&mut r);
        table.shuffle(&mut r);
    }
    let mut f = std::fs::File::create(path).unwrap();
    let header: Vec<&str> = order.iter().map(|&k| names[k]).collect();
    writeln!(f, "{}", header.join(",")).unwrap();
    for row in &table {
        let cells: Vec<String> = order.iter().map(|&k| format!("{}", row[k])).collect();
        writeln!(f, "{}", cells.join(",")).unwrap();
    }
}
