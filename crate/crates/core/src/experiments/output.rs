use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::StateFamily;

pub const CSV_HEADER: [&str; 10] = ["experiment_id", "n", "method", "pair_id", "true_overlap", "estimate", "abs_error", "shots", "seed", "wall_ms"];

/// One estimate. `true_overlap` and `abs_error` are blank when the states
/// are too large for an exact overlap; `wall_ms` is blank unless timing
/// was requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub n: usize,
    pub method: String,
    pub pair_id: u64,
    pub true_overlap: Option<f64>,
    pub estimate: f64,
    pub abs_error: Option<f64>,
    pub shots: u64,
    pub seed: u64,
    pub wall_ms: Option<f64>,
}

impl ResultRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(experiment_id: &str, n: usize, method: impl Into<String>, pair_id: u64, truth: Option<f64>, estimate: f64, shots: u64, seed: u64) -> Self {
        ResultRow {
            experiment_id: experiment_id.to_string(),
            n,
            method: method.into(),
            pair_id,
            true_overlap: truth,
            estimate,
            abs_error: truth.map(|t| (estimate - t).abs()),
            shots,
            seed,
            wall_ms: None,
        }
    }
}

/// Writes `rows` as CSV under the fixed header, creating parent directories.
pub fn write_results(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub count: usize,
    /// Mean absolute error and its standard error over instances.
    pub mae: f64,
    pub mae_stderr: f64,
}

impl MethodSummary {
    /// `None` when no row of `method` carries an error.
    pub fn from_rows<'a>(method: &str, rows: impl IntoIterator<Item = &'a ResultRow>) -> Option<Self> {
        let errors: Vec<f64> = rows.into_iter().filter(|r| r.method == method).filter_map(|r| r.abs_error).collect();
        if errors.is_empty() {
            return None;
        }
        let count = errors.len();
        let (mae, var) = crate::estimator::mean_var(errors);
        Some(MethodSummary { method: method.to_string(), count, mae, mae_stderr: (var / count as f64).sqrt() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    /// Crossing shot count averaged over batches.
    pub mean_shots: f64,
    pub censored_batches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub family: StateFamily,
    pub method: String,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope and intercept of `log₂(mean shots)` against `n`;
    /// absent with fewer than two sizes.
    pub exponent: Option<f64>,
    pub intercept: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub family: StateFamily,
    pub n: usize,
    pub mean_true_overlap: Option<f64>,
    pub methods: Vec<MethodSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub outcomes: usize,
    pub nu: f64,
    pub angles_deg: Vec<f64>,
    pub evaluated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcSummary {
    pub steps: usize,
    pub nu_best: f64,
    pub accepted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Summary {
    Estimate {
        stderr: f64,
    },
    Scaling {
        threshold: f64,
        fits: Vec<ScalingFit>,
    },
    CircuitCompare {
        circuit: String,
        backend: String,
        mean_true_overlap: f64,
        methods: Vec<MethodSummary>,
        /// Smallest certified output fidelity over pairs (1 for dense runs).
        min_fidelity_lower_bound: f64,
    },
    RandmeasCompare {
        groups: Vec<GroupSummary>,
    },
    PovmSearch {
        reference_nu: f64,
        grid: Vec<GridSummary>,
        mcmc: McmcSummary,
        /// Searches whose best `ν` is below the reference.
        beats_reference: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub master_seed: u64,
    pub csv: PathBuf,
    pub rows: usize,
    pub config: ExperimentConfig,
    pub summary: Summary,
}

/// `results/x.csv` → `results/x.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

/// Writes the CSV and its manifest; returns the manifest path.
pub fn write_run(cfg: &ExperimentConfig, output: &ExperimentOutput, csv: &Path) -> Result<PathBuf> {
    write_results(&output.rows, csv)?;
    let manifest = RunManifest {
        toolkit: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.seed,
        csv: csv.to_path_buf(),
        rows: output.rows.len(),
        config: cfg.clone(),
        summary: output.summary.clone(),
    };
    let path = manifest_path(csv);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}
