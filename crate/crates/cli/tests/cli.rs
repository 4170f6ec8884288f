use std::process::Command;

fn qoverlap(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qoverlap")).args(args).output().unwrap()
}

#[test]
fn povm_search_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("search.csv");
    let o = qoverlap(&["povm-search", "--outcomes", "6", "--mcmc-steps", "200", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("experiment_id,n,method,pair_id,true_overlap,estimate,abs_error,shots,seed,wall_ms\n"));
    assert_eq!(csv.lines().count(), 3);
    assert!(dir.path().join("search.manifest.json").exists());
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["povm-search", "--mcmc-steps", "0", "--out", out],
        vec!["scaling", "--threshold", "0", "--out", out],
        vec!["circuit-compare", "--circuit", "toffoli", "--out", out],
        vec!["randmeas-compare", "--qp-shots", "5000", "--out", out],
        vec!["scaling", "--no-such-flag"],
    ] {
        let o = qoverlap(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("est.csv");
    std::fs::write(&cfg, format!("experiment = \"estimate\"\nseed = 5\nout = {:?}\n[estimate]\nn = 1\nshots = 100\n", out)).unwrap();
    let o = qoverlap(&["estimate", "--config", cfg.to_str().unwrap(), "--shots", "300", "--id", "demo"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let row = std::fs::read_to_string(&out).unwrap().lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("demo,1,quasiprob,0,"), "{row}");
    assert!(row.contains(",300,"), "{row}");

    let o = qoverlap(&["scaling", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("estimate experiment"));
}
