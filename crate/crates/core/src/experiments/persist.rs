use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{count_support, mean_distribution, CellResult, RegretRecord};
use crate::dp::StrengthDistribution;
use crate::error::{Error, Result};
use crate::sepcmaes::Termination;

/// One optimizer run as stored in a cell document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub runtime: f64,
    /// Weights for `k = 0..=n`.
    pub weights: Vec<f64>,
    pub evals: u64,
    pub termination: Termination,
}

/// JSON document describing one `(n, lambda)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDocument {
    pub n: usize,
    pub lambda: u32,
    pub base_seed: u64,
    pub best_runtime: f64,
    pub runs: Vec<RunRecord>,
    pub good_runs: Vec<usize>,
    pub per_k_mean: Vec<f64>,
    pub per_k_std: Vec<f64>,
    pub max_std: f64,
}

impl From<&CellResult> for CellDocument {
    fn from(cell: &CellResult) -> Self {
        CellDocument {
            n: cell.n,
            lambda: cell.lambda,
            base_seed: cell.base_seed,
            best_runtime: cell.best_runtime,
            runs: cell
                .runs
                .iter()
                .map(|r| RunRecord {
                    seed: r.seed,
                    runtime: r.best_runtime,
                    weights: r.best_distribution.weights().to_vec(),
                    evals: r.evals_used,
                    termination: r.termination,
                })
                .collect(),
            good_runs: cell.good_runs.clone(),
            per_k_mean: cell.per_k_mean.clone(),
            per_k_std: cell.per_k_std.clone(),
            max_std: cell.max_std,
        }
    }
}

impl CellDocument {
    pub fn mean_distribution(&self) -> Result<StrengthDistribution> {
        if self.per_k_mean.len() != self.n {
            return Err(Error::invalid(format!(
                "per_k_mean has {} entries for n = {}",
                self.per_k_mean.len(),
                self.n
            )));
        }
        mean_distribution(&self.per_k_mean)
    }
}

/// Row of `runtimes.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub n: usize,
    pub lambda: u32,
    pub best_runtime: f64,
}

#[derive(Serialize)]
struct SupportRow {
    n: usize,
    lambda: u32,
    support_count: usize,
}

#[derive(Serialize)]
struct RegretRow<'a> {
    n: usize,
    lambda: u32,
    baseline: &'a str,
    runtime: f64,
    regret: f64,
}

pub fn cell_file_name(n: usize, lambda: u32) -> String {
    format!("cell_n{n}_lambda{lambda}.json")
}

/// Writes `bytes` to `path` through a temporary file so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_cell_json(dir: &Path, cell: &CellResult) -> Result<PathBuf> {
    let path = dir.join(cell_file_name(cell.n, cell.lambda));
    let mut text = serde_json::to_string_pretty(&CellDocument::from(cell))?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

pub fn read_cell_json(path: &Path) -> Result<CellDocument> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::invalid(format!("csv buffer: {e}")))
}

pub fn write_runtimes_csv(path: &Path, cells: &[CellResult]) -> Result<()> {
    let rows = cells.iter().map(|c| RuntimeRow {
        n: c.n,
        lambda: c.lambda,
        best_runtime: c.best_runtime,
    });
    write_atomic(path, &csv_bytes(rows)?)
}

pub fn read_runtimes_csv(path: &Path) -> Result<Vec<RuntimeRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{}: {other:?}", path.display())),
    })?;
    Ok(r.deserialize().collect::<Result<Vec<RuntimeRow>, _>>()?)
}

pub fn write_support_csv(path: &Path, cells: &[CellResult], threshold: f64) -> Result<()> {
    let rows = cells
        .iter()
        .map(|c| {
            Ok(SupportRow {
                n: c.n,
                lambda: c.lambda,
                support_count: count_support(&c.mean_distribution()?, threshold),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_atomic(path, &csv_bytes(rows)?)
}

pub fn write_regret_csv(path: &Path, records: &[RegretRecord]) -> Result<()> {
    let labels: Vec<String> = records.iter().map(|r| r.baseline.to_string()).collect();
    let rows = records.iter().zip(&labels).map(|(r, label)| RegretRow {
        n: r.n,
        lambda: r.lambda,
        baseline: label,
        runtime: r.baseline_runtime,
        regret: r.regret,
    });
    write_atomic(path, &csv_bytes(rows)?)
}

/// Writes one JSON document per cell plus `runtimes.csv` and `support.csv` into `dir`.
pub fn write_grid(dir: &Path, cells: &[CellResult], threshold: f64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for cell in cells {
        write_cell_json(dir, cell)?;
    }
    write_runtimes_csv(&dir.join("runtimes.csv"), cells)?;
    write_support_csv(&dir.join("support.csv"), cells, threshold)
}
