//! Calibration-data ingestion. The CSV schema is fixed:
//!
//! `year,p_union,g_annual,b,k_over_qy_annual,mu_data,delta_annual,u_data,v_data`
//!
//! Empty cells mark missing observations; annual-rate columns are converted
//! to the engine's monthly convention on the way in.

use anyhow::{bail, Context, Result};
use powerecon::params::{annual_to_monthly, TimeSeriesRow};
use std::path::Path;

pub const COLUMNS: [&str; 9] = [
    "year",
    "p_union",
    "g_annual",
    "b",
    "k_over_qy_annual",
    "mu_data",
    "delta_annual",
    "u_data",
    "v_data",
];

pub fn read_rows(path: &Path) -> Result<Vec<TimeSeriesRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening data file {}", path.display()))?;
    let headers = reader.headers()?.clone();
    for (i, expected) in COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h == *expected => {}
            Some(h) => bail!(
                "data schema mismatch: column {} is `{h}`, expected `{expected}`",
                i + 1
            ),
            None => bail!("data schema mismatch: missing column `{expected}`"),
        }
    }
    if headers.len() != COLUMNS.len() {
        bail!(
            "data schema mismatch: expected {} columns, found {}",
            COLUMNS.len(),
            headers.len()
        );
    }

    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let record = record.with_context(|| format!("reading data line {line}"))?;
        let get = |i: usize| -> Result<Option<f64>> {
            let raw = record.get(i).unwrap_or("");
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>().map(Some).with_context(|| {
                format!(
                    "column `{}` on line {line} is not numeric: `{raw}`",
                    COLUMNS[i]
                )
            })
        };
        let year: i32 = record
            .get(0)
            .unwrap_or("")
            .parse()
            .with_context(|| format!("column `year` on line {line} is not an integer"))?;
        rows.push(TimeSeriesRow {
            year,
            p_union: get(1)?,
            g: get(2)?.map(annual_to_monthly),
            b: get(3)?,
            k_over_qy_annual: get(4)?,
            mu_data: get(5)?,
            delta_data: get(6)?.map(annual_to_monthly),
            u_data: get(7)?,
            v_data: get(8)?,
        });
    }
    if rows.is_empty() {
        bail!("data file {} has no rows", path.display());
    }
    Ok(rows)
}
