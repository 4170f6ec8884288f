use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qoverlap::experiments::{self, parse_name, ExperimentConfig, ExperimentKind};
use qoverlap::{Error, StateFamily};

#[derive(Parser)]
#[command(name = "qoverlap", version, about = "Overlap estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate one overlap from a random pair or two saved sample records.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        pairing: Option<String>,
        #[arg(long, requires = "sigma_record")]
        rho_record: Option<PathBuf>,
        #[arg(long, requires = "rho_record")]
        sigma_record: Option<PathBuf>,
    },
    /// Shots needed to reach an error threshold, against qubit count.
    Scaling {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Comma-separated: product, entangled.
        #[arg(long, value_delimiter = ',')]
        families: Option<Vec<String>>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        batches: Option<usize>,
        #[arg(long)]
        pairs_per_batch: Option<usize>,
        #[arg(long)]
        start_shots: Option<usize>,
        #[arg(long)]
        max_shots: Option<usize>,
        #[arg(long)]
        pairing: Option<String>,
    },
    /// Quasiprobabilistic estimates against a noisy overlap circuit.
    CircuitCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// standard-swap or bell.
        #[arg(long)]
        circuit: Option<String>,
        /// stacked or interleaved.
        #[arg(long)]
        layout: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        pairing: Option<String>,
        #[arg(long)]
        cnot_lambda: Option<f64>,
        #[arg(long)]
        readout_flip: Option<f64>,
        /// both-qubits or target-only.
        #[arg(long)]
        placement: Option<String>,
        /// auto, dense or tensor-network.
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        max_bond: Option<usize>,
        #[arg(long)]
        max_kraus: Option<usize>,
    },
    /// Quasiprobabilistic against randomized-measurement estimates.
    RandmeasCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        families: Option<Vec<String>>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        qp_shots: Option<usize>,
        #[arg(long)]
        settings: Option<usize>,
        #[arg(long)]
        shots_per_setting: Option<usize>,
        #[arg(long)]
        pairing: Option<String>,
    },
    /// Grid and random-walk searches for measurements with smaller negativity.
    PovmSearch {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        outcomes: Option<Vec<usize>>,
        #[arg(long)]
        resolution_deg: Option<f64>,
        #[arg(long)]
        mcmc_steps: Option<usize>,
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long)]
        proposal_scale: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path (default results/<experiment>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Value of the experiment_id column.
    #[arg(long)]
    id: Option<String>,
    /// Fill the wall_ms column.
    #[arg(long)]
    wall_time: bool,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parsed<T: serde::de::DeserializeOwned>(slot: &mut T, field: &str, value: Option<String>) -> qoverlap::Result<()> {
    if let Some(v) = value {
        *slot = parse_name(field, &v)?;
    }
    Ok(())
}

fn families(slot: &mut Vec<StateFamily>, field: &str, value: Option<Vec<String>>) -> qoverlap::Result<()> {
    if let Some(names) = value {
        *slot = names.iter().map(|v| parse_name(field, v)).collect::<qoverlap::Result<_>>()?;
    }
    Ok(())
}

fn base(kind: ExperimentKind, common: &Common) -> qoverlap::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(kind),
    };
    if cfg.experiment != kind {
        return Err(Error::Config(format!("config describes a {} experiment, not {}", cfg.experiment.name(), kind.name())));
    }
    set(&mut cfg.seed, common.seed);
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if common.id.is_some() {
        cfg.id = common.id.clone();
    }
    cfg.record_wall_time |= common.wall_time;
    Ok(cfg)
}

fn configure(command: Command) -> qoverlap::Result<ExperimentConfig> {
    let cfg = match command {
        Command::Estimate { common, n, family, shots, pairing, rho_record, sigma_record } => {
            let mut cfg = base(ExperimentKind::Estimate, &common)?;
            let e = &mut cfg.estimate;
            set(&mut e.n, n);
            parsed(&mut e.family, "family", family)?;
            set(&mut e.shots, shots);
            parsed(&mut e.pairing, "pairing", pairing)?;
            if rho_record.is_some() {
                e.rho_record = rho_record;
                e.sigma_record = sigma_record;
            }
            cfg
        }
        Command::Scaling { common, n_min, n_max, families: fams, threshold, batches, pairs_per_batch, start_shots, max_shots, pairing } => {
            let mut cfg = base(ExperimentKind::Scaling, &common)?;
            let s = &mut cfg.scaling;
            set(&mut s.n_min, n_min);
            set(&mut s.n_max, n_max);
            families(&mut s.families, "families", fams)?;
            set(&mut s.threshold, threshold);
            set(&mut s.batches, batches);
            set(&mut s.pairs_per_batch, pairs_per_batch);
            set(&mut s.start_shots, start_shots);
            set(&mut s.max_shots, max_shots);
            parsed(&mut s.pairing, "pairing", pairing)?;
            cfg
        }
        Command::CircuitCompare {
            common,
            n,
            circuit,
            layout,
            family,
            pairs,
            shots,
            pairing,
            cnot_lambda,
            readout_flip,
            placement,
            backend,
            max_bond,
            max_kraus,
        } => {
            let mut cfg = base(ExperimentKind::CircuitCompare, &common)?;
            let c = &mut cfg.circuit;
            set(&mut c.n, n);
            parsed(&mut c.circuit, "circuit", circuit)?;
            parsed(&mut c.layout, "layout", layout)?;
            parsed(&mut c.family, "family", family)?;
            set(&mut c.pairs, pairs);
            set(&mut c.shots, shots);
            parsed(&mut c.pairing, "pairing", pairing)?;
            set(&mut c.noise.cnot_lambda, cnot_lambda);
            set(&mut c.noise.readout_flip, readout_flip);
            parsed(&mut c.noise.placement, "placement", placement)?;
            parsed(&mut c.backend, "backend", backend)?;
            set(&mut c.max_bond, max_bond);
            set(&mut c.max_kraus, max_kraus);
            cfg
        }
        Command::RandmeasCompare { common, n_min, n_max, families: fams, instances, qp_shots, settings, shots_per_setting, pairing } => {
            let mut cfg = base(ExperimentKind::RandmeasCompare, &common)?;
            let r = &mut cfg.randmeas;
            set(&mut r.n_min, n_min);
            set(&mut r.n_max, n_max);
            families(&mut r.families, "families", fams)?;
            set(&mut r.instances, instances);
            set(&mut r.qp_shots, qp_shots);
            set(&mut r.settings, settings);
            set(&mut r.shots_per_setting, shots_per_setting);
            parsed(&mut r.pairing, "pairing", pairing)?;
            cfg
        }
        Command::PovmSearch { common, outcomes, resolution_deg, mcmc_steps, temperature, proposal_scale } => {
            let mut cfg = base(ExperimentKind::PovmSearch, &common)?;
            let p = &mut cfg.povm_search;
            set(&mut p.outcomes, outcomes);
            set(&mut p.resolution_deg, resolution_deg);
            set(&mut p.mcmc_steps, mcmc_steps);
            set(&mut p.temperature, temperature);
            set(&mut p.proposal_scale, proposal_scale);
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match configure(cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = experiments::run(&cfg).and_then(|output| {
        let csv = cfg.out_path();
        let manifest = experiments::write_run(&cfg, &output, &csv)?;
        Ok((output, csv, manifest))
    });
    match result {
        Ok((output, csv, manifest)) => {
            println!("{}", serde_json::to_string_pretty(&output.summary).expect("summary serializes"));
            println!("wrote {} rows to {} ({})", output.rows.len(), csv.display(), manifest.display());
            ExitCode::SUCCESS
        }
        Err(e @ (Error::Config(_) | Error::InvalidParameter(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
