use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuits::{LayoutKind, NoiseModel};
use crate::error::{Error, Result};
use crate::estimator::Pairing;
use crate::tensornet::TruncationCaps;
use crate::{StateFamily, DENSE_MAX_QUBITS};

pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Estimate,
    Scaling,
    CircuitCompare,
    RandmeasCompare,
    PovmSearch,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::CircuitCompare => "circuit-compare",
            ExperimentKind::RandmeasCompare => "randmeas-compare",
            ExperimentKind::PovmSearch => "povm-search",
        }
    }
}

/// Top-level run description. Every section has working defaults, so a
/// config file only needs `experiment = "..."` plus whatever it overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Written to the `experiment_id` column; defaults to the kind name.
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// CSV destination; defaults to `results/<kind>.csv`.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Fill the `wall_ms` column. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub estimate: EstimateConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub circuit: CircuitConfig,
    #[serde(default)]
    pub randmeas: RandmeasConfig,
    #[serde(default)]
    pub povm_search: PovmSearchConfig,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub n: usize,
    pub family: StateFamily,
    pub shots: usize,
    pub pairing: Pairing,
    /// Pre-recorded outcomes; when both are set no states are generated.
    pub rho_record: Option<PathBuf>,
    pub sigma_record: Option<PathBuf>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { n: 2, family: StateFamily::Entangled, shots: 10_000, pairing: Pairing::AllPairs, rho_record: None, sigma_record: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub families: Vec<StateFamily>,
    pub threshold: f64,
    pub batches: usize,
    pub pairs_per_batch: usize,
    pub start_shots: usize,
    /// Searches that have not crossed by here stop and are reported censored.
    pub max_shots: usize,
    pub pairing: Pairing,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            n_min: 1,
            n_max: 6,
            families: vec![StateFamily::Product, StateFamily::Entangled],
            threshold: 0.05,
            batches: 10,
            pairs_per_batch: 5,
            start_shots: 64,
            max_shots: 1 << 22,
            pairing: Pairing::AllPairs,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitKind {
    #[default]
    StandardSwap,
    Bell,
}

impl CircuitKind {
    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::StandardSwap => "standard-swap",
            CircuitKind::Bell => "bell",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitBackend {
    /// Dense up to [`super::DENSE_CIRCUIT_MAX_WIDTH`] lines, LPDO beyond.
    #[default]
    Auto,
    Dense,
    TensorNetwork,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitConfig {
    pub n: usize,
    pub circuit: CircuitKind,
    pub layout: LayoutKind,
    pub family: StateFamily,
    pub pairs: usize,
    /// Circuit runs, and shots per state for the quasiprobabilistic side.
    pub shots: usize,
    pub pairing: Pairing,
    pub noise: NoiseModel,
    pub backend: CircuitBackend,
    pub max_bond: usize,
    pub max_kraus: usize,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        let caps = TruncationCaps::default();
        CircuitConfig {
            n: 2,
            circuit: CircuitKind::StandardSwap,
            layout: LayoutKind::Stacked,
            family: StateFamily::Entangled,
            pairs: 60,
            shots: 500,
            pairing: Pairing::AllPairs,
            noise: NoiseModel::default(),
            backend: CircuitBackend::Auto,
            max_bond: caps.max_bond,
            max_kraus: caps.max_kraus,
        }
    }
}

impl CircuitConfig {
    pub fn caps(&self) -> Result<TruncationCaps> {
        TruncationCaps::new(self.max_bond, self.max_kraus)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandmeasConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub families: Vec<StateFamily>,
    pub instances: usize,
    /// Shots per state for the quasiprobabilistic method.
    pub qp_shots: usize,
    pub settings: usize,
    pub shots_per_setting: usize,
    pub pairing: Pairing,
}

impl Default for RandmeasConfig {
    fn default() -> Self {
        RandmeasConfig {
            n_min: 1,
            n_max: 4,
            families: vec![StateFamily::Product, StateFamily::Entangled],
            instances: 50,
            qp_shots: 10_000,
            settings: 100,
            shots_per_setting: 100,
            pairing: Pairing::AllPairs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PovmSearchConfig {
    pub outcomes: Vec<usize>,
    pub resolution_deg: f64,
    pub mcmc_steps: usize,
    pub temperature: f64,
    pub proposal_scale: f64,
}

impl Default for PovmSearchConfig {
    fn default() -> Self {
        PovmSearchConfig { outcomes: vec![4, 6, 8], resolution_deg: 30.0, mcmc_steps: 10_000, temperature: 0.05, proposal_scale: 0.05 }
    }
}

/// Parses a kebab- or lower-case variant name as used in config files,
/// for example `"all-pairs"` or `"entangled"`.
pub fn parse_name<T: serde::de::DeserializeOwned>(field: &str, value: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string())).map_err(|_| bad(format!("{field}: unrecognized value {value:?}")))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_range(section: &str, n_min: usize, n_max: usize, max: usize) -> Result<()> {
    if n_min == 0 {
        return Err(bad(format!("{section}.n_min must be at least 1")));
    }
    if n_max < n_min {
        return Err(bad(format!("{section}.n_max = {n_max} is below n_min = {n_min}")));
    }
    if n_max > max {
        return Err(bad(format!("{section}.n_max = {n_max} exceeds {max}")));
    }
    Ok(())
}

fn check_positive(section: &str, fields: &[(&str, usize)]) -> Result<()> {
    for (name, v) in fields {
        if *v == 0 {
            return Err(bad(format!("{section}.{name} must be at least 1")));
        }
    }
    Ok(())
}

/// Qubit limit for experiments that draw random states as MPS.
pub const MAX_EXPERIMENT_QUBITS: usize = 64;

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            id: None,
            seed: DEFAULT_SEED,
            out: None,
            record_wall_time: false,
            estimate: EstimateConfig::default(),
            scaling: ScalingConfig::default(),
            circuit: CircuitConfig::default(),
            randmeas: RandmeasConfig::default(),
            povm_search: PovmSearchConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| bad(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn experiment_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.experiment.name().to_string())
    }

    pub fn out_path(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(format!("results/{}.csv", self.experiment.name())))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(id) = &self.id {
            if id.is_empty() || id.contains([',', '"', '\n', '\r']) {
                return Err(bad(format!("id {id:?} must be non-empty and free of commas, quotes and newlines")));
            }
        }

        let e = &self.estimate;
        check_positive("estimate", &[("n", e.n), ("shots", e.shots)])?;
        if e.n > MAX_EXPERIMENT_QUBITS {
            return Err(bad(format!("estimate.n = {} exceeds {MAX_EXPERIMENT_QUBITS}", e.n)));
        }
        if e.rho_record.is_some() != e.sigma_record.is_some() {
            return Err(bad("estimate.rho_record and estimate.sigma_record must be given together"));
        }

        let s = &self.scaling;
        // errors are measured against exact overlaps
        check_range("scaling", s.n_min, s.n_max, DENSE_MAX_QUBITS)?;
        if !(s.threshold > 0.0 && s.threshold < 1.0) {
            return Err(bad(format!("scaling.threshold = {} outside (0, 1)", s.threshold)));
        }
        check_positive("scaling", &[("batches", s.batches), ("pairs_per_batch", s.pairs_per_batch), ("start_shots", s.start_shots)])?;
        if s.max_shots < s.start_shots {
            return Err(bad(format!("scaling.max_shots = {} is below start_shots = {}", s.max_shots, s.start_shots)));
        }
        if s.families.is_empty() {
            return Err(bad("scaling.families is empty"));
        }

        let c = &self.circuit;
        check_positive("circuit", &[("n", c.n), ("pairs", c.pairs), ("shots", c.shots), ("max_bond", c.max_bond), ("max_kraus", c.max_kraus)])?;
        if c.n > MAX_EXPERIMENT_QUBITS {
            return Err(bad(format!("circuit.n = {} exceeds {MAX_EXPERIMENT_QUBITS}", c.n)));
        }
        c.noise.validate().map_err(|err| bad(format!("circuit.noise: {err}")))?;

        let r = &self.randmeas;
        check_range("randmeas", r.n_min, r.n_max, MAX_EXPERIMENT_QUBITS)?;
        check_positive("randmeas", &[("instances", r.instances), ("qp_shots", r.qp_shots), ("settings", r.settings), ("shots_per_setting", r.shots_per_setting)])?;
        let rm_total = r.settings.saturating_mul(r.shots_per_setting);
        if rm_total.abs_diff(r.qp_shots) > 1 {
            return Err(bad(format!(
                "randmeas budgets differ: qp_shots = {} but settings × shots_per_setting = {rm_total}",
                r.qp_shots
            )));
        }
        if r.families.is_empty() {
            return Err(bad("randmeas.families is empty"));
        }

        let p = &self.povm_search;
        if p.outcomes.is_empty() {
            return Err(bad("povm_search.outcomes is empty"));
        }
        if let Some(o) = p.outcomes.iter().find(|o| ![4, 6, 8].contains(*o)) {
            return Err(bad(format!("povm_search.outcomes contains {o}; only 4, 6 and 8 are searchable")));
        }
        if !(p.resolution_deg > 0.0 && p.resolution_deg <= 180.0) {
            return Err(bad(format!("povm_search.resolution_deg = {} outside (0, 180]", p.resolution_deg)));
        }
        if p.mcmc_steps == 0 {
            return Err(bad("povm_search.mcmc_steps must be at least 1"));
        }
        for (name, v) in [("temperature", p.temperature), ("proposal_scale", p.proposal_scale)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(format!("povm_search.{name} = {v} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}
