//! Loader for the cross-country growth dataset.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimators::Dataset;
use crate::numkit::Matrix;

pub const OUTCOME: &str = "Outcome";
pub const TREATMENT: &str = "gdpsh465";

/// The 60 candidate controls, in canonical order.
pub const CONTROLS: [&str; 60] = [
    "bmp1l", "freeop", "freetar", "h65", "hm65", "hf65", "p65", "pm65", "pf65", "s65", "sm65",
    "sf65", "fert65", "mort65", "lifee065", "gpop1", "fert1", "mort1", "invsh41", "geetot1",
    "geerec1", "gde1", "govwb1", "govsh41", "gvxdxe41", "high65", "highm65", "highf65",
    "highc65", "highcm65", "highcf65", "human65", "humanm65", "humanf65", "hyr65", "hyrm65",
    "hyrf65", "no65", "nom65", "nof65", "pinstab1", "pop65", "worker65", "pop1565", "pop6565",
    "sec65", "secm65", "secf65", "secc65", "seccm65", "seccf65", "syr65", "syrm65", "syrf65",
    "teapri65", "teasec65", "ex1", "im1", "xr65", "tot1",
];

/// Environment variable naming the dataset location.
pub const DATA_ENV: &str = "PDSEL_GROWTH_CSV";

/// `$PDSEL_GROWTH_CSV`, else `data/GrowthData.csv` when it exists.
pub fn default_growth_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os(DATA_ENV) {
        return Some(PathBuf::from(p));
    }
    let local = PathBuf::from("data/GrowthData.csv");
    local.exists().then_some(local)
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | ".")
}

/// Some published copies carry a leading unnamed row index and a constant
/// `intercept` column; both are dropped.
fn ignorable(name: &str) -> bool {
    name.is_empty() || name == "intercept"
}

/// Read the growth dataset. Columns may come in any order; rows with a
/// missing cell are dropped.
pub fn load_growth_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_growth_csv(&text[..])
}

pub fn parse_growth_csv<R: std::io::Read>(input: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let position: HashMap<&str, usize> =
        header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    let expected: Vec<&str> = [OUTCOME, TREATMENT].into_iter().chain(CONTROLS).collect();
    let missing: Vec<String> = expected
        .iter()
        .filter(|c| !position.contains_key(*c))
        .map(|c| c.to_string())
        .collect();
    let unexpected: Vec<String> = header
        .iter()
        .filter(|h| !ignorable(h) && !expected.contains(&h.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() || !unexpected.is_empty() || position.len() != header.len() {
        return Err(Error::Schema {
            missing,
            unexpected,
        });
    }
    let idx: Vec<usize> = expected.iter().map(|c| position[c]).collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        let cells: Vec<&str> = idx.iter().map(|&i| rec.get(i).unwrap_or("")).collect();
        if cells.iter().any(|c| is_missing(c)) {
            continue;
        }
        let mut row = Vec::with_capacity(cells.len());
        for (k, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: r + 1,
                column: expected[k].to_string(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: r + 1,
                    column: expected[k].to_string(),
                    value: cell.to_string(),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    let n = rows.len();
    let y = rows.iter().map(|r| r[0]).collect();
    let d = rows.iter().map(|r| r[1]).collect();
    let x = Matrix::from_fn(n, CONTROLS.len(), |i, j| rows[i][j + 2]);
    Dataset::new(y, d, x, CONTROLS.iter().map(|s| s.to_string()).collect())
}
