use nalgebra::DVector;
use qoverlap::circuits::{
    build_bell_circuit, build_standard_swap_test, circuit_expectation_dense, count_resources, estimate_overlap_via_circuit, estimate_overlap_via_circuit_dense, improved_swap_cnot_count, route_long_range_cnot, Circuit, Gate,
    LayoutKind, NoiseModel,
};
use qoverlap::dense::{exact_overlap, random_pure_state};
use qoverlap::rng::rng_from_seed;
use qoverlap::tensornet::{cnot_matrix, TruncationCaps};
use qoverlap::{DenseState, Mps, RandomStateSpec, C64};
use rand_distr::{Distribution, StandardNormal};

fn random_dense(n: usize, seed: u64) -> DenseState {
    let mut rng = rng_from_seed(seed);
    let v = DVector::from_fn(1 << n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    DenseState::from_pure_normalized(v).unwrap()
}

fn apply_cnots(mut s: DenseState, gates: &[Gate]) -> DenseState {
    let cx = cnot_matrix(true);
    for g in gates {
        match *g {
            Gate::Cnot { control, target } => {
                assert_eq!(control.abs_diff(target), 1);
                s = s.apply_unitary(&cx, &[control, target]).unwrap();
            }
            Gate::Single { .. } => panic!("routing emits CNOTs only"),
        }
    }
    s
}

#[test]
fn routing_law() {
    for d in 1..=10usize {
        for (control, target) in [(0, d), (d, 0)] {
            let width = d + 1;
            let gates = route_long_range_cnot(control, target, width).unwrap();
            assert_eq!(gates.len(), 4 * (d - 1) + 1);
            for seed in 0..2 {
                let psi = random_dense(width, 10 * d as u64 + seed);
                let routed = apply_cnots(psi.clone(), &gates);
                let ideal = psi.apply_unitary(&cnot_matrix(true), &[control, target]).unwrap();
                let (a, b) = (routed.amplitudes().unwrap(), ideal.amplitudes().unwrap());
                assert!((a - b).camax() < 1e-9, "d = {d}");
            }
        }
    }
    assert!(route_long_range_cnot(2, 2, 4).is_err());
    assert!(route_long_range_cnot(0, 4, 4).is_err());
}

#[test]
fn bell_and_improved_counts() {
    let want = [(1, 1, 12), (2, 10, 60), (3, 27, 144), (8, 232, 1104)];
    for (n, bell, improved) in want {
        let c = build_bell_circuit(n, LayoutKind::Stacked).unwrap();
        assert_eq!(c.cnot_count(), bell);
        assert_eq!(count_resources(&c).unwrap().0, bell);
        assert_eq!(improved_swap_cnot_count(n).unwrap(), improved);
    }
    for n in 1..=8 {
        assert_eq!(build_bell_circuit(n, LayoutKind::Stacked).unwrap().cnot_count(), n * (4 * n - 3));
        assert_eq!(build_bell_circuit(n, LayoutKind::Interleaved).unwrap().cnot_count(), n);
    }
    let swap = build_standard_swap_test(2, LayoutKind::Stacked).unwrap();
    assert!(swap.is_nearest_neighbour());
    assert_eq!(swap.cnot_count(), 96);
}

#[test]
fn noiseless_circuits_give_exact_overlap() {
    let quiet = NoiseModel::noiseless();
    for n in 1..=3 {
        for kind in [LayoutKind::Stacked, LayoutKind::Interleaved] {
            let circuits = [build_bell_circuit(n, kind).unwrap(), build_standard_swap_test(n, kind).unwrap()];
            for seed in 0..4 {
                let rho = random_pure_state(&RandomStateSpec::entangled(n, 2 * seed)).unwrap();
                let sigma = random_pure_state(&RandomStateSpec::entangled(n, 2 * seed + 1)).unwrap();
                let truth = exact_overlap(&rho, &sigma).unwrap();
                for c in &circuits {
                    let e = circuit_expectation_dense(c, &rho, &sigma, &quiet).unwrap();
                    assert!((e - truth).abs() < 1e-9, "n = {n}: {e} vs {truth}");
                }
            }
        }
    }
    let swap = build_standard_swap_test(1, LayoutKind::Stacked).unwrap();
    let zero = DenseState::basis(1, 0).unwrap();
    let one = DenseState::basis(1, 1).unwrap();
    assert!((circuit_expectation_dense(&swap, &zero, &zero, &quiet).unwrap() - 1.0).abs() < 1e-10);
    assert!(circuit_expectation_dense(&swap, &zero, &one, &quiet).unwrap().abs() < 1e-10);
}

#[test]
fn full_depolarization_collapses_estimates() {
    let noise = NoiseModel { cnot_lambda: 1.0, readout_flip: 0.0, ..NoiseModel::default() };
    let rho = random_pure_state(&RandomStateSpec::entangled(2, 3)).unwrap();
    let swap = build_standard_swap_test(2, LayoutKind::Stacked).unwrap();
    assert!(circuit_expectation_dense(&swap, &rho, &rho, &noise).unwrap().abs() < 1e-9);
    // uniformly random bits give E[(−1)^{pq}] = 1/2 per pair
    let bell = build_bell_circuit(2, LayoutKind::Stacked).unwrap();
    assert!((circuit_expectation_dense(&bell, &rho, &rho, &noise).unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn error_grows_with_cnot_noise() {
    // infinite-shot error, so the comparison is free of shot noise
    let bell = build_bell_circuit(2, LayoutKind::Stacked).unwrap();
    let mut prev = -1.0;
    for lambda in [0.0, 0.002, 0.005, 0.01] {
        let noise = NoiseModel { cnot_lambda: lambda, readout_flip: 0.0, ..NoiseModel::default() };
        let mut mae = 0.0;
        for seed in 0..50 {
            let rho = random_pure_state(&RandomStateSpec::entangled(2, 100 + seed)).unwrap();
            let sigma = random_pure_state(&RandomStateSpec::entangled(2, 200 + seed)).unwrap();
            let truth = exact_overlap(&rho, &sigma).unwrap();
            mae += (circuit_expectation_dense(&bell, &rho, &sigma, &noise).unwrap() - truth).abs() / 50.0;
        }
        assert!(mae >= prev - 1e-12, "λ = {lambda}: {mae} < {prev}");
        prev = mae;
    }
    assert!(prev > 0.0);
}

#[test]
fn sampled_estimates_agree_with_dense_limit() {
    let noise = NoiseModel::default();
    for (circ, n) in [(build_standard_swap_test(2, LayoutKind::Stacked).unwrap(), 2), (build_bell_circuit(3, LayoutKind::Stacked).unwrap(), 3)] {
        for seed in 0..3u64 {
            let rho = random_pure_state(&RandomStateSpec::entangled(n, 40 + seed)).unwrap();
            let sigma = random_pure_state(&RandomStateSpec::entangled(n, 50 + seed)).unwrap();
            let want = circuit_expectation_dense(&circ, &rho, &sigma, &noise).unwrap();
            let got = estimate_overlap_via_circuit_dense(&circ, &rho, &sigma, &noise, 20_000, seed).unwrap();
            assert_eq!(got.fidelity_lower_bound, 1.0);
            assert!((got.estimate.mean - want).abs() < 4.0 * got.estimate.stderr + 1e-9, "{} vs {want}", got.estimate.mean);
        }
    }
}

#[test]
fn tensor_network_backend_matches_dense_on_small_circuits() {
    // short circuit, so unbounded caps stay cheap
    let noise = NoiseModel::default();
    let circ = build_bell_circuit(2, LayoutKind::Interleaved).unwrap();
    for seed in 0..3u64 {
        let sr = RandomStateSpec::entangled(2, 60 + seed);
        let ss = RandomStateSpec::entangled(2, 70 + seed);
        let want = circuit_expectation_dense(&circ, &random_pure_state(&sr).unwrap(), &random_pure_state(&ss).unwrap(), &noise).unwrap();
        let got = estimate_overlap_via_circuit(&circ, &Mps::random(&sr).unwrap(), &Mps::random(&ss).unwrap(), &noise, TruncationCaps::unbounded(), 20_000, seed).unwrap();
        assert_eq!(got.truncations, 0);
        assert!((got.fidelity_lower_bound - 1.0).abs() < 1e-12);
        assert!((got.estimate.mean - want).abs() < 4.0 * got.estimate.stderr + 1e-9, "{} vs {want}", got.estimate.mean);
    }
}

#[test]
fn backends_share_the_readout_stream() {
    // identical seeds give identical readout flips, so a noiseless circuit
    // with a deterministic output agrees shot for shot
    let circ = build_standard_swap_test(1, LayoutKind::Stacked).unwrap();
    let zero = DenseState::basis(1, 0).unwrap();
    let noise = NoiseModel { cnot_lambda: 0.0, readout_flip: 0.2, ..NoiseModel::default() };
    let dense = estimate_overlap_via_circuit_dense(&circ, &zero, &zero, &noise, 500, 9).unwrap();
    let mps = Mps::zero_state(1).unwrap();
    let tn = estimate_overlap_via_circuit(&circ, &mps, &mps, &noise, TruncationCaps::default(), 500, 9).unwrap();
    assert_eq!(dense.estimate, tn.estimate);
}

#[test]
fn unrecognized_circuit_is_rejected() {
    let mut c = Circuit::new(2);
    c.push(Gate::cnot(0, 1)).unwrap();
    let s = Mps::zero_state(1).unwrap();
    let r = estimate_overlap_via_circuit(&c, &s, &s, &NoiseModel::default(), TruncationCaps::default(), 10, 0);
    assert!(matches!(r, Err(qoverlap::Error::UnrecognizedCircuit)));
}
