//! CSV files: one row per experiment cell, and per-round simulation curves.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algo::Algorithm;
use crate::error::{BenchError, Result};
use crate::experiment::RunRecord;
use crate::simulate::SimCurves;
use crate::summary::Cell;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub dataset: String,
    pub loss: String,
    pub algo: String,
    pub sigma_factor: f64,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub d: usize,
    pub regret: f64,
    pub lin_regret: f64,
    #[serde(rename = "V_T")]
    pub v_t: f64,
    #[serde(rename = "B_T")]
    pub b_t: f64,
    pub resets: u64,
    pub wallclock_ms: f64,
    pub seed: u64,
}

impl From<&RunRecord> for CsvRow {
    fn from(r: &RunRecord) -> Self {
        CsvRow {
            dataset: r.dataset.clone(),
            loss: r.loss.to_string(),
            algo: r.algo.to_string(),
            sigma_factor: r.sigma_factor,
            rounds: r.rounds,
            d: r.dim,
            regret: r.regret,
            lin_regret: r.lin_regret,
            v_t: r.v_t,
            b_t: r.b_t,
            resets: r.resets,
            wallclock_ms: r.wallclock_ms,
            seed: r.seed,
        }
    }
}

impl CsvRow {
    /// Summary cell keyed by the table heading of the algorithm.
    pub fn to_cell(&self) -> Result<Cell> {
        Ok(Cell {
            dataset: self.dataset.clone(),
            loss: self.loss.clone(),
            algo: Algorithm::parse_any(&self.algo)?.table_name(),
            regret: self.regret,
        })
    }
}

pub fn write_rows(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(BenchError::from))
        .collect()
}

/// Reads every file matching `pattern`, in sorted path order.
pub fn read_glob(pattern: &str) -> Result<Vec<CsvRow>> {
    let paths = glob::glob(pattern)
        .map_err(|e| BenchError::Config(format!("bad glob {pattern:?}: {e}")))?;
    let mut rows = Vec::new();
    let mut any = false;
    for p in paths {
        let p = p.map_err(|e| BenchError::Io(e.into()))?;
        any = true;
        rows.extend(read_rows(&p)?);
    }
    if !any {
        return Err(BenchError::Data(format!("no files match {pattern:?}")));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct CurveRow {
    kind: String,
    seed: u64,
    round: usize,
    metagrad: f64,
    adagrad: f64,
    ogdnorm: f64,
}

pub fn write_curves(path: &Path, curves: &SimCurves) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for t in 0..curves.rounds() {
        w.serialize(CurveRow {
            kind: curves.kind.to_string(),
            seed: curves.seed,
            round: t + 1,
            metagrad: curves.metagrad[t],
            adagrad: curves.adagrad[t],
            ogdnorm: curves.ogdnorm[t],
        })?;
    }
    w.flush()?;
    Ok(())
}
