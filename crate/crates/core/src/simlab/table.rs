use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::montecarlo::GridCell;
use crate::error::Result;

/// One `(cell, method)` row of the long-format report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub rho: f64,
    pub psi_d: f64,
    pub method: String,
    pub bias: f64,
    pub rmse: f64,
    pub potency: f64,
    pub gauge: f64,
    pub mc_se_bias: f64,
    pub mc_se_rmse: f64,
    pub mc_se_potency: f64,
    pub mc_se_gauge: f64,
    pub failures: usize,
    #[serde(rename = "R")]
    pub reps: usize,
}

impl LongRow {
    pub fn from_cells(cells: &[GridCell]) -> Vec<LongRow> {
        cells
            .iter()
            .flat_map(|c| {
                c.report.methods.iter().map(move |m| LongRow {
                    rho: c.rho,
                    psi_d: c.psi_d,
                    method: m.method.clone(),
                    bias: m.bias,
                    rmse: m.rmse,
                    potency: m.potency,
                    gauge: m.gauge,
                    mc_se_bias: m.mc_se_bias,
                    mc_se_rmse: m.mc_se_rmse,
                    mc_se_potency: m.mc_se_potency,
                    mc_se_gauge: m.mc_se_gauge,
                    failures: m.failures,
                    reps: m.reps,
                })
            })
            .collect()
    }
}

/// Write rows as RFC 4180 CSV with a header line.
pub fn write_long_csv<W: Write>(out: W, rows: &[LongRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_long_csv<R: Read>(input: R) -> Result<Vec<LongRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<LongRow>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let row = LongRow {
            rho: -0.6,
            psi_d: 4.0,
            method: "PDA-5%".into(),
            bias: 0.1 + 0.2,
            rmse: 1.0 / 3.0,
            potency: 0.9056,
            gauge: 1e-17,
            mc_se_bias: 0.00123456789012345,
            mc_se_rmse: 2.5e-5,
            mc_se_potency: 0.0,
            mc_se_gauge: 7.0,
            failures: 2,
            reps: 200,
        };
        let mut buf = Vec::new();
        write_long_csv(&mut buf, &[row.clone(), row.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("rho,psi_d,method,bias,rmse,potency,gauge,"));
        assert!(!text.contains('\r'));
        assert_eq!(read_long_csv(&buf[..]).unwrap(), vec![row.clone(), row]);
    }
}
