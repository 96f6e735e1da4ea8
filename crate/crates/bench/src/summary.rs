//! Table-style summaries of regret cells: how often each algorithm is best,
//! how often it matches a baseline, and its median regret ratio.

use std::collections::HashMap;

use crate::error::{BenchError, Result};

/// One (dataset, loss, algorithm) regret.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub dataset: String,
    pub loss: String,
    pub algo: String,
    pub regret: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoSummary {
    pub algo: String,
    /// Rows where the regret is at most one unit above the row minimum.
    pub best: usize,
    /// Rows where the regret is at most one unit above the baseline.
    pub better_than_baseline: usize,
    pub median_ratio: Option<f64>,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub baseline: String,
    pub algos: Vec<AlgoSummary>,
    /// `(dataset, loss, algo)` combinations without a value.
    pub missing: Vec<(String, String, String)>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Keeps the smallest regret per (dataset, loss, algo), as when the best
/// sigma of a sweep is reported.
pub fn best_per_cell(cells: &[Cell]) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::new();
    let mut index: HashMap<(String, String, String), usize> = HashMap::new();
    for c in cells {
        let key = (c.dataset.clone(), c.loss.clone(), c.algo.clone());
        match index.get(&key) {
            Some(&i) => {
                if c.regret < out[i].regret {
                    out[i].regret = c.regret;
                }
            }
            None => {
                index.insert(key, out.len());
                out.push(c.clone());
            }
        }
    }
    out
}

pub fn summarize(cells: &[Cell], baseline: &str) -> Result<Summary> {
    let cells = best_per_cell(cells);
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut algos: Vec<String> = Vec::new();
    let mut table: HashMap<(&str, &str, &str), f64> = HashMap::new();
    for c in &cells {
        if !c.regret.is_finite() {
            return Err(BenchError::Data(format!(
                "non-finite regret for {}/{}/{}",
                c.dataset, c.loss, c.algo
            )));
        }
        let row = (c.dataset.clone(), c.loss.clone());
        if !rows.contains(&row) {
            rows.push(row);
        }
        if !algos.contains(&c.algo) {
            algos.push(c.algo.clone());
        }
        table.insert((&c.dataset, &c.loss, &c.algo), c.regret);
    }
    if !algos.iter().any(|a| a == baseline) {
        return Err(BenchError::Config(format!(
            "baseline {baseline:?} has no cells (algorithms: {})",
            algos.join(", ")
        )));
    }

    let mut missing = Vec::new();
    let mut best = vec![0usize; algos.len()];
    let mut better = vec![0usize; algos.len()];
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); algos.len()];
    let mut counts = vec![0usize; algos.len()];
    for (ds, loss) in &rows {
        let values: Vec<Option<f64>> = algos
            .iter()
            .map(|a| {
                table
                    .get(&(ds.as_str(), loss.as_str(), a.as_str()))
                    .copied()
            })
            .collect();
        let row_min = values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let base = table.get(&(ds.as_str(), loss.as_str(), baseline)).copied();
        for (i, v) in values.iter().enumerate() {
            let Some(v) = *v else {
                missing.push((ds.clone(), loss.clone(), algos[i].clone()));
                continue;
            };
            counts[i] += 1;
            if v <= row_min + 1.0 {
                best[i] += 1;
            }
            if let Some(b) = base {
                if v <= b + 1.0 {
                    better[i] += 1;
                }
                if b > 0.0 {
                    ratios[i].push(v / b);
                }
            }
        }
    }
    let algos = algos
        .into_iter()
        .enumerate()
        .map(|(i, algo)| AlgoSummary {
            algo,
            best: best[i],
            better_than_baseline: better[i],
            median_ratio: median(&mut ratios[i]),
            cells: counts[i],
        })
        .collect();
    Ok(Summary {
        baseline: baseline.to_string(),
        algos,
        missing,
    })
}

impl Summary {
    pub fn get(&self, algo: &str) -> Option<&AlgoSummary> {
        self.algos.iter().find(|a| a.algo == algo)
    }

    /// Plain-text table.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<10} {:>6} {:>12} {:>12} {:>6}\n",
            "Algorithm",
            "# best",
            format!("# <= {}", self.baseline),
            "MedianRatio",
            "cells"
        );
        for a in &self.algos {
            let ratio = a
                .median_ratio
                .map_or("-".to_string(), |r| format!("{r:.2}"));
            out.push_str(&format!(
                "{:<10} {:>6} {:>12} {:>12} {:>6}\n",
                a.algo, a.best, a.better_than_baseline, ratio, a.cells
            ));
        }
        if !self.missing.is_empty() {
            out.push_str(&format!("missing cells: {}\n", self.missing.len()));
            for (d, l, a) in &self.missing {
                out.push_str(&format!("  {d}/{l}/{a}\n"));
            }
        }
        out
    }
}
