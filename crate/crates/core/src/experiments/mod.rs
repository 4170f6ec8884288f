//! Experiment runner: random-pair benchmarks of the overlap estimators,
//! written as flat CSV tables plus a JSON run manifest.
//!
//! Every random quantity derives from the master seed through fixed
//! labels, so a config reproduces its rows exactly regardless of the
//! thread count.

mod compare;
mod config;
mod output;
mod scaling;

use std::time::Instant;

pub use compare::{run_circuit_compare, run_randmeas_compare, DENSE_CIRCUIT_MAX_WIDTH};
pub use config::{
    CircuitBackend, CircuitConfig, CircuitKind, EstimateConfig, ExperimentConfig, ExperimentKind, PovmSearchConfig, RandmeasConfig, ScalingConfig, DEFAULT_SEED, parse_name,
    MAX_EXPERIMENT_QUBITS,
};
pub use output::{
    manifest_path, read_results, write_results, write_run, ExperimentOutput, GridSummary, GroupSummary, McmcSummary, MethodSummary, ResultRow, RunManifest, ScalingFit,
    ScalingPoint, Summary, CSV_HEADER,
};
pub use scaling::{fit_exponent, run_scaling};

use crate::dense::{exact_overlap, max_tabulated_qubits, random_pure_state};
use crate::error::Result;
use crate::estimator::{estimate_overlap_with, sample_outcomes, EstimateResult, Pairing, StateRef};
use crate::povm::{compute_t_matrix, pauli6, pauli6_estimator, ProductPovm};
use crate::rng::split;
use crate::search::{grid_search_povm, mcmc_tau_search, McmcConfig};
use crate::{DenseState, Mps, RandomStateSpec, SampleRecord, StateFamily, DENSE_MAX_QUBITS};

pub const QUASIPROB: &str = "quasiprob";

/// Labels separating the seed streams of different experiments.
mod stream {
    pub const ESTIMATE: u64 = 1;
    pub const SCALING: u64 = 2;
    pub const CIRCUIT: u64 = 3;
    pub const RANDMEAS: u64 = 4;
    pub const POVM_SEARCH: u64 = 5;
}

/// A random (ρ, σ) pair, kept dense when small enough for exact overlaps.
pub(crate) struct StatePair {
    pub n: usize,
    pub seed: u64,
    pub rho: Mps,
    pub sigma: Mps,
    pub dense: Option<(DenseState, DenseState)>,
}

impl StatePair {
    pub fn draw(family: StateFamily, n: usize, seed: u64) -> Result<Self> {
        let (sr, ss) = (RandomStateSpec::of_family(family, n, split(seed, 0)), RandomStateSpec::of_family(family, n, split(seed, 1)));
        let dense = if n <= DENSE_MAX_QUBITS { Some((random_pure_state(&sr)?, random_pure_state(&ss)?)) } else { None };
        Ok(StatePair { n, seed, rho: Mps::random(&sr)?, sigma: Mps::random(&ss)?, dense })
    }

    pub fn truth(&self) -> Result<Option<f64>> {
        self.dense.as_ref().map(|(r, s)| exact_overlap(r, s)).transpose()
    }

    /// Dense when the Born table for `m` outcomes per qubit fits, else MPS.
    pub fn refs(&self, m: usize) -> (StateRef<'_>, StateRef<'_>) {
        match &self.dense {
            Some((r, s)) if self.n <= max_tabulated_qubits(m) => (r.into(), s.into()),
            _ => ((&self.rho).into(), (&self.sigma).into()),
        }
    }
}

/// Pauli-6 estimate from `shots` fresh shots of each state.
pub(crate) fn quasiprob_estimate(pair: &StatePair, shots: usize, pairing: Pairing, seed: u64) -> Result<EstimateResult> {
    let povm = ProductPovm::pauli6(pair.n);
    let (r, s) = pair.refs(povm.outcomes_per_qubit());
    let rec_r = sample_outcomes(r, &povm, shots, split(seed, 1), "rho")?;
    let rec_s = sample_outcomes(s, &povm, shots, split(seed, 2), "sigma")?;
    estimate_overlap_with(&rec_r, &rec_s, &pauli6_estimator(), pairing)
}

pub(crate) fn timed<T>(on: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, on.then(|| start.elapsed().as_secs_f64() * 1e3)))
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Estimate => run_estimate(cfg),
        ExperimentKind::Scaling => run_scaling(cfg),
        ExperimentKind::CircuitCompare => run_circuit_compare(cfg),
        ExperimentKind::RandmeasCompare => run_randmeas_compare(cfg),
        ExperimentKind::PovmSearch => run_povm_search(cfg),
    }
}

/// One estimate, either from two saved sample records or from a freshly
/// drawn random pair.
pub fn run_estimate(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let e = &cfg.estimate;
    let id = cfg.experiment_id();
    let (row, stderr) = match (&e.rho_record, &e.sigma_record) {
        (Some(a), Some(b)) => {
            let (ra, rb) = (SampleRecord::load(a)?, SampleRecord::load(b)?);
            let ((est, wall), n) = (timed(cfg.record_wall_time, || estimate_overlap_with(&ra, &rb, &pauli6_estimator(), e.pairing))?, ra.n());
            let mut row = ResultRow::new(&id, n, QUASIPROB, 0, None, est.mean, est.shots as u64, ra.seed());
            row.wall_ms = wall;
            (row, est.stderr)
        }
        _ => {
            let seed = split(cfg.seed, stream::ESTIMATE);
            let pair = StatePair::draw(e.family, e.n, seed)?;
            let (est, wall) = timed(cfg.record_wall_time, || quasiprob_estimate(&pair, e.shots, e.pairing, split(seed, 10)))?;
            let mut row = ResultRow::new(&id, e.n, QUASIPROB, 0, pair.truth()?, est.mean, est.shots as u64, seed);
            row.wall_ms = wall;
            (row, est.stderr)
        }
    };
    Ok(ExperimentOutput { rows: vec![row], summary: Summary::Estimate { stderr } })
}

/// Grid searches over the configured outcome counts plus a random walk
/// over generalized inverses of the Pauli-6 `T`. Rows carry the best `ν`
/// in the `estimate` column.
pub fn run_povm_search(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = &cfg.povm_search;
    let id = cfg.experiment_id();
    let reference_nu = pauli6_estimator().negativity();
    let mut rows = Vec::new();
    let mut grid = Vec::new();
    for &outcomes in &p.outcomes {
        let (r, wall) = timed(cfg.record_wall_time, || grid_search_povm(outcomes, p.resolution_deg))?;
        let mut row = ResultRow::new(&id, 1, format!("grid-{outcomes}"), 0, None, r.nu, 0, cfg.seed);
        row.wall_ms = wall;
        rows.push(row);
        grid.push(GridSummary { outcomes, nu: r.nu, angles_deg: r.angles_deg, evaluated: r.evaluated });
    }
    let seed = split(cfg.seed, stream::POVM_SEARCH);
    let mcmc_cfg = McmcConfig { steps: p.mcmc_steps, temperature: p.temperature, proposal_scale: p.proposal_scale, seed };
    let (walk, wall) = timed(cfg.record_wall_time, || mcmc_tau_search(&compute_t_matrix(&pauli6()), &mcmc_cfg))?;
    let mut row = ResultRow::new(&id, 1, "mcmc", 0, None, walk.nu_best, 0, seed);
    row.wall_ms = wall;
    rows.push(row);
    let beats_reference = rows.iter().filter(|r| r.estimate < reference_nu - 1e-9).map(|r| r.method.clone()).collect();
    Ok(ExperimentOutput {
        rows,
        summary: Summary::PovmSearch {
            reference_nu,
            grid,
            mcmc: McmcSummary { steps: p.mcmc_steps, nu_best: walk.nu_best, accepted: walk.accepted },
            beats_reference,
        },
    })
}
