use qoverlap::circuits::NoiseModel;
use qoverlap::dense::{exact_overlap, random_pure_state};
use qoverlap::estimator::{estimate_overlap_with, sample_outcomes};
use qoverlap::experiments::{self, read_results, write_results, write_run, ExperimentConfig, ExperimentKind, ResultRow, Summary, CSV_HEADER};
use qoverlap::povm::pauli6_estimator;
use qoverlap::randmeas::{estimate_overlap_rm, generate_settings};
use qoverlap::{Error, Pairing, ProductPovm, RandomStateSpec, StateFamily};

fn config(kind: ExperimentKind, extra: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!("experiment = \"{}\"\n{extra}", kind.name())).unwrap()
}

fn rejected(text: &str) -> String {
    match ExperimentConfig::from_toml_str(text) {
        Err(Error::Config(msg)) => msg,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn config_defaults_and_overrides() {
    let cfg = config(ExperimentKind::Scaling, "seed = 7\n[scaling]\nn_max = 3\nfamilies = [\"entangled\"]\npairing = \"paired\"\n");
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.scaling.n_max, 3);
    assert_eq!(cfg.scaling.families, vec![StateFamily::Entangled]);
    assert_eq!(cfg.scaling.pairing, Pairing::Paired);
    assert_eq!(cfg.scaling.batches, 10);
    assert_eq!(cfg.out_path(), std::path::PathBuf::from("results/scaling.csv"));

    let c = config(ExperimentKind::CircuitCompare, "[circuit.noise]\ncnot_lambda = 0.01\n");
    assert_eq!(c.circuit.noise, NoiseModel { cnot_lambda: 0.01, ..NoiseModel::default() });
    assert_eq!(c.circuit.pairs, 60);

    let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn config_validation_messages() {
    assert!(rejected("experiment = \"povm-search\"\n[povm_search]\nmcmc_steps = 0\n").contains("mcmc_steps"));
    assert!(rejected("experiment = \"scaling\"\n[scaling]\nthreshold = 1.5\n").contains("threshold"));
    assert!(rejected("experiment = \"scaling\"\n[scaling]\nn_min = 4\nn_max = 2\n").contains("n_max"));
    assert!(rejected("experiment = \"randmeas-compare\"\n[randmeas]\nsettings = 50\n").contains("budgets differ"));
    assert!(rejected("experiment = \"circuit-compare\"\n[circuit.noise]\nreadout_flip = 2.0\n").contains("readout_flip"));
    assert!(rejected("experiment = \"povm-search\"\n[povm_search]\noutcomes = [5]\n").contains("outcomes"));
    assert!(rejected("experiment = \"estimate\"\n[estimate]\nrho_record = \"a.txt\"\n").contains("together"));
    assert!(rejected("experiment = \"scaling\"\nbogus = 1\n").contains("bogus"));
    assert!(rejected("experiment = \"teleport\"\n").contains("teleport"));
    assert!(rejected("seed = 1\n").contains("experiment"));
}

#[test]
fn csv_round_trip_and_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    write_results(&[], &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), CSV_HEADER.join(",") + "\n");
    assert!(read_results(&empty).unwrap().is_empty());

    let mut rows = vec![
        ResultRow::new("x", 2, "quasiprob", 0, Some(0.25), 0.3125, 500, 11),
        ResultRow::new("x", 2, "circuit-bell", 0, Some(0.25), -0.1 / 3.0, 500, 11),
        ResultRow::new("x", 20, "quasiprob", 1, None, 1e-17, 10, u64::MAX),
    ];
    rows[1].wall_ms = Some(12.5);
    let path = dir.path().join("sub/rows.csv");
    write_results(&rows, &path).unwrap();
    assert_eq!(read_results(&path).unwrap(), rows);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().nth(3).unwrap().starts_with("x,20,quasiprob,1,,1e-17,,10,"));
}

#[test]
fn absolute_error_column_is_consistent() {
    let cfg = config(ExperimentKind::CircuitCompare, "[circuit]\npairs = 6\nshots = 200\n");
    let out = experiments::run(&cfg).unwrap();
    assert_eq!(out.rows.len(), 12);
    for r in &out.rows {
        assert!((r.abs_error.unwrap() - (r.estimate - r.true_overlap.unwrap()).abs()).abs() < 1e-12);
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(ExperimentKind::RandmeasCompare, "[randmeas]\nn_max = 2\ninstances = 4\nqp_shots = 400\nsettings = 20\nshots_per_setting = 20\n");
    let mut bodies = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.csv"));
        let manifest = write_run(&cfg, &experiments::run(&cfg).unwrap(), &path).unwrap();
        assert!(manifest.exists());
        bodies.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    let other = ExperimentConfig { seed: cfg.seed + 1, ..cfg.clone() };
    assert_ne!(experiments::run(&other).unwrap().rows, experiments::run(&cfg).unwrap().rows);
}

#[test]
fn manifest_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(ExperimentKind::Estimate, "seed = 3\n[estimate]\nshots = 200\n");
    let out = experiments::run(&cfg).unwrap();
    let path = write_run(&cfg, &out, &dir.path().join("e.csv")).unwrap();
    let manifest: experiments::RunManifest = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(manifest.master_seed, 3);
    assert_eq!(manifest.config, cfg);
    assert_eq!(manifest.rows, 1);
    assert!(matches!(manifest.summary, Summary::Estimate { .. }));
}

#[test]
fn estimate_from_saved_records() {
    let dir = tempfile::tempdir().unwrap();
    let rho = random_pure_state(&RandomStateSpec::product(2, 1)).unwrap();
    let povm = ProductPovm::pauli6(2);
    let rec = sample_outcomes(&rho, &povm, 3000, 4, "rho").unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.bin"));
    rec.save(&a).unwrap();
    rec.save(&b).unwrap();
    let cfg = config(ExperimentKind::Estimate, &format!("[estimate]\nrho_record = {:?}\nsigma_record = {:?}\n", a, b));
    let out = experiments::run(&cfg).unwrap();
    let want = estimate_overlap_with(&rec, &rec, &pauli6_estimator(), Pairing::AllPairs).unwrap().mean;
    assert_eq!(out.rows[0].estimate, want);
    assert_eq!(out.rows[0].true_overlap, None);
}

#[test]
fn scaling_crossings_exist_and_fit() {
    let cfg = config(ExperimentKind::Scaling, "[scaling]\nn_max = 3\nbatches = 3\n");
    let out = experiments::run(&cfg).unwrap();
    let Summary::Scaling { fits, .. } = out.summary else { panic!("wrong summary") };
    assert_eq!(fits.len(), 2);
    for f in &fits {
        assert_eq!(f.points.len(), 3);
        assert!(f.points.iter().all(|p| p.censored_batches == 0 && p.mean_shots >= 48.0));
        assert!(f.exponent.unwrap().is_finite());
    }
    assert_eq!(out.rows.len(), 2 * 3 * 3 * 5);
    // a batch passes only when its mean error is under the threshold
    for chunk in out.rows.chunks(5) {
        let mean = chunk.iter().map(|r| r.abs_error.unwrap()).sum::<f64>() / 5.0;
        assert!(mean < 0.05);
        assert!(chunk.iter().all(|r| r.shots == chunk[0].shots));
    }
}

#[test]
fn identical_states_converge() {
    // ρ = σ on one qubit: some doubling of the budget gets under 0.05
    let rho = random_pure_state(&RandomStateSpec::product(1, 9)).unwrap();
    let povm = ProductPovm::pauli6(1);
    let mut shots = 64;
    let crossed = loop {
        let a = sample_outcomes(&rho, &povm, shots, 1, "a").unwrap();
        let b = sample_outcomes(&rho, &povm, shots, 2, "b").unwrap();
        let e = estimate_overlap_with(&a, &b, &pauli6_estimator(), Pairing::AllPairs).unwrap();
        if (e.mean - 1.0).abs() < 0.05 {
            break Some(shots);
        }
        if shots > 1 << 20 {
            break None;
        }
        shots *= 2;
    };
    assert!(crossed.is_some());
}

#[test]
fn noiseless_comparison_is_shot_noise_limited() {
    let cfg = config(ExperimentKind::CircuitCompare, "[circuit]\npairs = 40\nshots = 500\n[circuit.noise]\ncnot_lambda = 0.0\nreadout_flip = 0.0\n");
    let out = experiments::run(&cfg).unwrap();
    for method in ["quasiprob", "circuit-standard-swap"] {
        let signed: Vec<f64> = out.rows.iter().filter(|r| r.method == method).map(|r| r.estimate - r.true_overlap.unwrap()).collect();
        let (mean, var) = qoverlap::estimator::mean_var(signed.iter().copied());
        assert!(mean.abs() < 3.0 * (var / signed.len() as f64).sqrt(), "{method}: bias {mean}");
    }
}

#[test]
fn identical_states_at_full_budget() {
    let mut err = [0.0; 2];
    for seed in 0..10 {
        let rho = random_pure_state(&RandomStateSpec::product(1, 50 + seed)).unwrap();
        let povm = ProductPovm::pauli6(1);
        let a = sample_outcomes(&rho, &povm, 10_000, 1, "a").unwrap();
        let b = sample_outcomes(&rho, &povm, 10_000, 2, "b").unwrap();
        err[0] += (estimate_overlap_with(&a, &b, &pauli6_estimator(), Pairing::AllPairs).unwrap().mean - 1.0).abs() / 10.0;
        let settings = generate_settings(1, 100, 100, seed).unwrap();
        err[1] += (estimate_overlap_rm(&rho, &rho, &settings).unwrap().mean - 1.0).abs() / 10.0;
    }
    assert!(err[0] < 0.05 && err[1] < 0.05, "{err:?}");
    assert!((exact_overlap(&random_pure_state(&RandomStateSpec::product(1, 50)).unwrap(), &random_pure_state(&RandomStateSpec::product(1, 50)).unwrap()).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn povm_search_report() {
    let cfg = config(ExperimentKind::PovmSearch, "[povm_search]\noutcomes = [6]\nmcmc_steps = 500\n");
    let out = experiments::run(&cfg).unwrap();
    let Summary::PovmSearch { reference_nu, grid, mcmc, beats_reference } = out.summary else { panic!("wrong summary") };
    assert!((reference_nu - 9.0).abs() < 1e-9);
    assert!((grid[0].nu - 9.0).abs() < 1e-9);
    assert!(mcmc.nu_best >= 9.0 - 1e-9);
    assert!(beats_reference.is_empty());
    assert_eq!(out.rows.len(), 2);
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert_eq!(seen, 5);
}
