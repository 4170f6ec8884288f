use rayon::prelude::*;

use super::config::{CircuitBackend, CircuitKind, ExperimentConfig};
use super::output::{ExperimentOutput, GroupSummary, MethodSummary, ResultRow, Summary};
use super::{quasiprob_estimate, stream, timed, StatePair, QUASIPROB};
use crate::circuits::{build_bell_circuit, build_standard_swap_test, estimate_overlap_via_circuit, estimate_overlap_via_circuit_dense, Circuit};
use crate::error::Result;
use crate::randmeas::{estimate_overlap_rm, generate_settings};
use crate::rng::{split, split_path};
use crate::StateFamily;

/// Widest circuit the automatic backend simulates densely.
pub const DENSE_CIRCUIT_MAX_WIDTH: usize = 10;

pub const RANDMEAS: &str = "randmeas";

fn build(kind: CircuitKind, cfg: &ExperimentConfig) -> Result<Circuit> {
    let c = &cfg.circuit;
    match kind {
        CircuitKind::StandardSwap => build_standard_swap_test(c.n, c.layout),
        CircuitKind::Bell => build_bell_circuit(c.n, c.layout),
    }
}

/// Quasiprobabilistic estimates against a noisy overlap circuit on the same
/// random pairs. Each circuit run consumes one copy of each state, so both
/// methods use `shots` copies of ρ and of σ.
pub fn run_circuit_compare(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let c = &cfg.circuit;
    let id = cfg.experiment_id();
    let circ = build(c.circuit, cfg)?;
    let dense = match c.backend {
        CircuitBackend::Auto => circ.width() <= DENSE_CIRCUIT_MAX_WIDTH,
        CircuitBackend::Dense => true,
        CircuitBackend::TensorNetwork => false,
    };
    let caps = c.caps()?;
    let circuit_method = format!("circuit-{}", c.circuit.name());
    let per_pair = (0..c.pairs)
        .into_par_iter()
        .map(|i| {
            let seed = split_path(cfg.seed, &[stream::CIRCUIT, i as u64]);
            let pair = StatePair::draw(c.family, c.n, seed)?;
            let truth = pair.truth()?;
            let (qp, qp_wall) = timed(cfg.record_wall_time, || quasiprob_estimate(&pair, c.shots, c.pairing, split(seed, 10)))?;
            let (ce, ce_wall) = timed(cfg.record_wall_time, || match (&pair.dense, dense) {
                (Some((r, s)), true) => estimate_overlap_via_circuit_dense(&circ, r, s, &c.noise, c.shots, split(seed, 20)),
                _ => estimate_overlap_via_circuit(&circ, &pair.rho, &pair.sigma, &c.noise, caps, c.shots, split(seed, 20)),
            })?;
            let mut a = ResultRow::new(&id, c.n, QUASIPROB, i as u64, truth, qp.mean, c.shots as u64, seed);
            a.wall_ms = qp_wall;
            let mut b = ResultRow::new(&id, c.n, circuit_method.clone(), i as u64, truth, ce.estimate.mean, c.shots as u64, seed);
            b.wall_ms = ce_wall;
            Ok(([a, b], truth, ce.fidelity_lower_bound))
        })
        .collect::<Result<Vec<_>>>()?;

    let truths: Vec<f64> = per_pair.iter().filter_map(|p| p.1).collect();
    let mean_true_overlap = if truths.is_empty() { f64::NAN } else { truths.iter().sum::<f64>() / truths.len() as f64 };
    let min_fidelity_lower_bound = per_pair.iter().map(|p| p.2).fold(1.0, f64::min);
    let rows: Vec<ResultRow> = per_pair.into_iter().flat_map(|p| p.0).collect();
    let methods = [QUASIPROB, circuit_method.as_str()].iter().filter_map(|m| MethodSummary::from_rows(m, &rows)).collect();
    Ok(ExperimentOutput {
        rows,
        summary: Summary::CircuitCompare {
            circuit: c.circuit.name().to_string(),
            backend: if dense { "dense" } else { "tensor-network" }.to_string(),
            mean_true_overlap,
            methods,
            min_fidelity_lower_bound,
        },
    })
}

/// Quasiprobabilistic against randomized-measurement estimates at equal
/// per-state shot budgets.
pub fn run_randmeas_compare(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let r = &cfg.randmeas;
    let id = cfg.experiment_id();
    let work: Vec<(StateFamily, usize, usize)> =
        r.families.iter().flat_map(|&f| (r.n_min..=r.n_max).flat_map(move |n| (0..r.instances).map(move |i| (f, n, i)))).collect();
    let per_instance = work
        .par_iter()
        .map(|&(family, n, i)| {
            let seed = split_path(cfg.seed, &[stream::RANDMEAS, family as u64, n as u64, i as u64]);
            let pair = StatePair::draw(family, n, seed)?;
            let truth = pair.truth()?;
            let (qp, qp_wall) = timed(cfg.record_wall_time, || quasiprob_estimate(&pair, r.qp_shots, r.pairing, split(seed, 10)))?;
            let (rm, rm_wall) = timed(cfg.record_wall_time, || {
                let settings = generate_settings(n, r.settings, r.shots_per_setting, split(seed, 30))?;
                let (a, b) = pair.refs(2);
                estimate_overlap_rm(a, b, &settings)
            })?;
            let method = |m: &str| format!("{m}-{}", family.name());
            let mut a = ResultRow::new(&id, n, method(QUASIPROB), i as u64, truth, qp.mean, r.qp_shots as u64, seed);
            a.wall_ms = qp_wall;
            let mut b = ResultRow::new(&id, n, method(RANDMEAS), i as u64, truth, rm.mean, (r.settings * r.shots_per_setting) as u64, seed);
            b.wall_ms = rm_wall;
            Ok([a, b])
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ResultRow> = per_instance.into_iter().flatten().collect();

    let mut groups = Vec::new();
    for &family in &r.families {
        for n in r.n_min..=r.n_max {
            let in_group: Vec<&ResultRow> = rows.iter().filter(|row| row.n == n && row.method.ends_with(family.name())).collect();
            let truths: Vec<f64> = in_group.iter().filter(|row| row.method.starts_with(QUASIPROB)).filter_map(|row| row.true_overlap).collect();
            let mean_true_overlap = (!truths.is_empty()).then(|| truths.iter().sum::<f64>() / truths.len() as f64);
            let methods = [QUASIPROB, RANDMEAS]
                .iter()
                .filter_map(|m| MethodSummary::from_rows(&format!("{m}-{}", family.name()), in_group.iter().copied()))
                .collect();
            groups.push(GroupSummary { family, n, mean_true_overlap, methods });
        }
    }
    Ok(ExperimentOutput { rows, summary: Summary::RandmeasCompare { groups } })
}
