//! CSV rows `r,i,lo,hi`, one row per cell and level.

use std::io::{Read, Write};
use std::sync::Arc;

use super::grid::LevelGrid;
use super::number::FuzzyNCell;
use crate::error::{FuzzyError, Result};

pub const CSV_HEADER: [&str; 4] = ["r", "i", "lo", "hi"];

pub fn write_csv<W: Write>(u: &FuzzyNCell, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for i in 0..u.dim() {
        for (k, r) in u.grid().levels().iter().enumerate() {
            w.write_record(&[
                r.to_string(),
                i.to_string(),
                u.lower(i, k).to_string(),
                u.upper(i, k).to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| FuzzyError::Csv(e.to_string()))?;
    Ok(())
}

/// Reads rows written by [`write_csv`]; the grid is rebuilt from the distinct
/// `r` values.
pub fn read_csv<R: Read>(input: R) -> Result<FuzzyNCell> {
    let mut rd = csv::Reader::from_reader(input);
    let mut rows: Vec<(f64, usize, f64, f64)> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(FuzzyError::Csv(format!("expected 4 fields, got {}", rec.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| FuzzyError::Csv(format!("bad number `{s}`: {e}")))
        };
        let cell = rec[1]
            .trim()
            .parse::<usize>()
            .map_err(|e| FuzzyError::Csv(format!("bad cell index `{}`: {e}", &rec[1])))?;
        rows.push((num(&rec[0])?, cell, num(&rec[2])?, num(&rec[3])?));
    }
    let mut levels: Vec<f64> = rows.iter().map(|r| r.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let grid: Arc<LevelGrid> = LevelGrid::from_levels(levels)?;
    let n = rows.iter().map(|r| r.1 + 1).max().unwrap_or(0);
    let len = grid.len();
    if rows.len() != n * len {
        return Err(FuzzyError::Csv(format!(
            "expected {} rows for {n} cells on {len} levels, got {}",
            n * len,
            rows.len()
        )));
    }
    let mut lower = vec![vec![f64::NAN; len]; n];
    let mut upper = vec![vec![f64::NAN; len]; n];
    for (r, i, lo, hi) in rows {
        let k = grid
            .levels()
            .binary_search_by(|x| x.total_cmp(&r))
            .map_err(|_| FuzzyError::Csv(format!("level {r} not on grid")))?;
        lower[i][k] = lo;
        upper[i][k] = hi;
    }
    FuzzyNCell::from_endpoints(grid, lower, upper)
}
