use nalgebra::DVector;
use qoverlap::dense::{apply_channel_dense, fidelity, random_pure_state, trace_distance};
use qoverlap::estimator::{index_tuple, sample_outcomes};
use qoverlap::linalg::{self, CMatrix};
use qoverlap::povm::ProductPovm;
use qoverlap::rng::rng_from_seed;
use qoverlap::tensornet::{cnot_matrix, fidelity_lower_bound, truncate_svd, tuple_probability, CnotNoise, NoisePlacement, TruncationCaps, TruncationKind};
use qoverlap::{DenseState, KrausSet, Lpdo, Mps, RandomStateSpec, TnState, TruncationLog, C64};
use rand::Rng;

fn hadamard() -> CMatrix {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

fn random_unitary(rng: &mut impl Rng) -> CMatrix {
    let (a, b, c, d): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
    let z = CMatrix::from_row_slice(2, 2, &[C64::new(a - 0.5, b - 0.5), C64::new(c - 0.5, d - 0.5), C64::new(b, -a), C64::new(d, c)]);
    let (u, _, vt) = linalg::svd_sorted(&z);
    u * vt
}

fn dense_cnot(rho: &DenseState, control: usize, target: usize, lambda: f64) -> DenseState {
    let mut out = rho.apply_unitary(&cnot_matrix(true), &[control, target]).unwrap();
    if lambda > 0.0 {
        let ch = KrausSet::depolarizing(lambda).unwrap();
        out = apply_channel_dense(&out, &ch, control).unwrap();
        out = apply_channel_dense(&out, &ch, target).unwrap();
    }
    out
}

#[test]
fn single_qubit_gates_match_dense() {
    let mut m = Mps::zero_state(1).unwrap();
    m.apply_single_qubit_gate(&hadamard(), 0).unwrap();
    let plus = DenseState::from_pure_normalized(DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])).unwrap();
    assert!((fidelity(&m.to_dense().unwrap(), &plus).unwrap() - 1.0).abs() < 1e-12);

    let spec = RandomStateSpec::entangled(3, 8);
    let mut m = Mps::random(&spec).unwrap();
    let before = m.to_dense().unwrap();
    m.apply_single_qubit_gate(&linalg::identity2(), 1).unwrap();
    assert!((fidelity(&m.to_dense().unwrap(), &before).unwrap() - 1.0).abs() < 1e-12);
    m.apply_single_qubit_gate(&linalg::pauli_x(), 2).unwrap();
    let want = before.apply_unitary(&linalg::pauli_x(), &[2]).unwrap();
    assert!((fidelity(&m.to_dense().unwrap(), &want).unwrap() - 1.0).abs() < 1e-12);

    let not_unitary = linalg::identity2() * C64::new(2.0, 0.0);
    assert!(m.apply_single_qubit_gate(&not_unitary, 0).is_err());
}

#[test]
fn random_mps_matches_dense_constructor() {
    for seed in 0..5 {
        let spec = RandomStateSpec::entangled(4, seed);
        let mps = Mps::random(&spec).unwrap().to_dense().unwrap();
        let dense = random_pure_state(&spec).unwrap();
        assert!((fidelity(&mps, &dense).unwrap() - 1.0).abs() < 1e-10);
        assert!((mps.trace() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn from_dense_round_trip() {
    let dense = random_pure_state(&RandomStateSpec::entangled(4, 3)).unwrap();
    let m = Mps::from_dense(&dense).unwrap();
    assert!((fidelity(&m.to_dense().unwrap(), &dense).unwrap() - 1.0).abs() < 1e-10);
    let zero = Mps::zero_state(3).unwrap().to_dense().unwrap();
    assert!((zero.amplitudes().unwrap()[0].re - 1.0).abs() < 1e-12);
}

#[test]
fn cnot_on_basis_states() {
    let mut log = TruncationLog::new();
    let mut m = Mps::basis_state(&[1, 0]).unwrap();
    m.apply_cnot(0, 1, &mut log).unwrap();
    let want = DenseState::basis(2, 3).unwrap();
    assert!((fidelity(&m.to_dense().unwrap(), &want).unwrap() - 1.0).abs() < 1e-12);

    // control on the right
    let mut m = Mps::basis_state(&[0, 1]).unwrap();
    m.apply_cnot(1, 0, &mut log).unwrap();
    assert!((fidelity(&m.to_dense().unwrap(), &want).unwrap() - 1.0).abs() < 1e-12);
    assert!(log.is_empty());
    assert!(Mps::zero_state(3).unwrap().apply_cnot(0, 2, &mut log).is_err());
}

#[test]
fn full_depolarization_gives_maximally_mixed_marginals() {
    let mut log = TruncationLog::new();
    let spec = RandomStateSpec::entangled(3, 4);
    let mut l = Lpdo::from_mps(Mps::random(&spec).unwrap(), TruncationCaps::unbounded());
    l.apply_cnot(1, 2, 1.0, &mut log).unwrap();
    let d = l.to_dense().unwrap();
    let half = linalg::identity2() * C64::new(0.5, 0.0);
    for q in [1, 2] {
        assert!(linalg::max_abs_diff_c(&d.reduced(&[q]), &half) < 1e-10);
    }

    let mut one = Lpdo::from_mps(Mps::zero_state(1).unwrap(), TruncationCaps::unbounded());
    one.apply_channel(0, &KrausSet::depolarizing(1.0).unwrap(), &mut log).unwrap();
    assert!(linalg::max_abs_diff_c(&one.to_dense().unwrap().density_matrix(), &half) < 1e-12);
}

#[test]
fn weak_noise_matches_dense_channel() {
    let mut log = TruncationLog::new();
    let mut l = Lpdo::from_mps(Mps::zero_state(2).unwrap(), TruncationCaps::unbounded());
    l.apply_single_qubit_gate(&hadamard(), 0).unwrap();
    l.apply_cnot(0, 1, 0.005, &mut log).unwrap();
    let d0 = DenseState::basis(2, 0).unwrap().apply_unitary(&hadamard(), &[0]).unwrap();
    let want = dense_cnot(&d0, 0, 1, 0.005);
    assert!(trace_distance(&l.to_dense().unwrap(), &want).unwrap() < 1e-10);
    assert!(log.is_empty());
}

#[test]
fn target_only_noise_leaves_control_alone() {
    let mut log = TruncationLog::new();
    let mut l = Lpdo::from_mps(Mps::basis_state(&[1, 0]).unwrap(), TruncationCaps::unbounded());
    let noise = CnotNoise { lambda: 1.0, placement: NoisePlacement::TargetOnly };
    l.apply_cnot_with(0, 1, noise, &mut log).unwrap();
    let d = l.to_dense().unwrap();
    assert!((d.reduced(&[0])[(1, 1)].re - 1.0).abs() < 1e-12);
    assert!((d.reduced(&[1])[(0, 0)].re - 0.5).abs() < 1e-12);
}

/// A random brickwork circuit on `n` qubits, applied to both the network
/// and the dense oracle.
fn run_circuit(n: usize, depth: usize, lambda: f64, caps: TruncationCaps, seed: u64) -> (TnState, DenseState, TruncationLog) {
    let mut rng = rng_from_seed(seed);
    let spec = RandomStateSpec::entangled(n, seed);
    let mut tn = TnState::Mps(Mps::random(&spec).unwrap());
    let mut dense = random_pure_state(&spec).unwrap();
    let mut log = TruncationLog::new();
    let noise = CnotNoise { lambda, placement: NoisePlacement::BothQubits };
    for layer in 0..depth {
        for q in 0..n {
            let u = random_unitary(&mut rng);
            tn.apply_single_qubit_gate(&u, q).unwrap();
            dense = dense.apply_unitary(&u, &[q]).unwrap();
        }
        for q in (layer % 2..n.saturating_sub(1)).step_by(2) {
            let (c, t) = if rng.gen::<bool>() { (q, q + 1) } else { (q + 1, q) };
            tn.apply_cnot(c, t, noise, caps, &mut log).unwrap();
            dense = dense_cnot(&dense, c, t, lambda);
        }
    }
    (tn, dense, log)
}

#[test]
fn unbounded_caps_match_dense_simulation() {
    for seed in 0..6 {
        let n = 2 + (seed as usize % 2);
        let (tn, dense, log) = run_circuit(n, 4, 0.05, TruncationCaps::unbounded(), seed);
        assert!(log.is_empty());
        let out = tn.to_dense().unwrap();
        assert!(trace_distance(&out, &dense).unwrap() < 1e-9);
        assert!((out.trace() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn forced_truncation_respects_bound_and_positivity() {
    let mut truncated_runs = 0;
    for seed in 0..12 {
        let caps = TruncationCaps::new(2, 1 + seed as usize % 2).unwrap();
        let (tn, dense, log) = run_circuit(3, 5, 0.1, caps, 100 + seed);
        let out = tn.to_dense().unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-8);
        let eig = linalg::hermitian_eigen(&out.density_matrix()).0;
        assert!(eig.iter().all(|&x| x > -1e-9));
        let bound = log.fidelity_lower_bound().unwrap();
        let f = fidelity(&dense, &out).unwrap();
        assert!(f >= bound - 1e-9, "fidelity {f} below bound {bound}");
        if !log.is_empty() {
            truncated_runs += 1;
            assert!(log.entries().iter().any(|e| e.kind == TruncationKind::Kraus));
        }
    }
    assert!(truncated_runs > 0);
}

#[test]
fn bound_examples_and_monotonicity() {
    assert_eq!(fidelity_lower_bound([]).unwrap(), 1.0);
    assert!((fidelity_lower_bound([0.1]).unwrap() - 0.994987).abs() < 1e-6);
    assert!((fidelity_lower_bound([0.1, 0.1]).unwrap() - 0.979950).abs() < 1e-6);
    assert!(fidelity_lower_bound([1.5]).is_err());
    let mut log = TruncationLog::new();
    let mut prev = 1.0;
    for k in 0..30 {
        log.push(TruncationKind::Bond, k % 3, 0.02 * (k % 5) as f64).unwrap();
        let b = log.fidelity_lower_bound().unwrap();
        assert!(b <= prev && b >= 0.0);
        prev = b;
    }
    assert!(prev < 0.5);
    log.push(TruncationKind::Bond, 0, 0.9).unwrap();
    assert_eq!(log.fidelity_lower_bound().unwrap(), 0.0);
    assert!(log.push(TruncationKind::Kraus, 0, -0.1).is_err());
}

#[test]
fn truncation_discarded_weight() {
    let s = 0.99f64.sqrt();
    let m = CMatrix::from_row_slice(2, 2, &[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.1, 0.0)]);
    let t = truncate_svd(&m, 1).unwrap();
    assert!((t.discarded_weight - 0.1).abs() < 1e-12);
    assert_eq!(t.kept, 1);
    let t = truncate_svd(&m, 2).unwrap();
    assert_eq!(t.discarded_weight, 0.0);
    assert!(truncate_svd(&m, 0).is_err());

    // product states never lose weight
    let mut log = TruncationLog::new();
    let mut p = Mps::random(&RandomStateSpec::product(4, 2)).unwrap().with_max_bond(1).unwrap();
    p.apply_cnot(0, 1, &mut log).unwrap_or(());
    let mut q = Mps::basis_state(&[0, 1, 1]).unwrap().with_max_bond(1).unwrap();
    q.apply_cnot(0, 1, &mut log).unwrap();
    assert!(log.entries().iter().all(|e| e.delta < 1e-7 || e.site == 0));
}

#[test]
fn conditional_sampler_matches_dense_distribution() {
    let spec = RandomStateSpec::entangled(3, 21);
    let tn = TnState::Mps(Mps::random(&spec).unwrap());
    let dense = random_pure_state(&spec).unwrap();
    let povm = ProductPovm::pauli6(3);
    // 216 outcomes: the sampling floor of the TV distance at 50,000 shots
    // is about 0.026, so use 200,000
    let shots = 200_000;
    let exact = qoverlap::dense::born_probabilities(&dense, &povm).unwrap();
    let a = sample_outcomes(&tn, &povm, shots, 1, "rho").unwrap().histogram().unwrap();
    let b = sample_outcomes(&dense, &povm, shots, 2, "rho").unwrap().histogram().unwrap();
    for emp in [&a, &b] {
        let tv: f64 = emp.probs().iter().zip(exact.probs()).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.02, "TV distance {tv}");
    }

    let mut t = [0u8; 3];
    for i in 0..216 {
        index_tuple(i, 3, 6, &mut t);
        let tuple: Vec<usize> = t.iter().map(|&x| x as usize).collect();
        let p = tuple_probability(&tn, &povm, &tuple).unwrap();
        assert!((p - exact.probs()[i]).abs() < 1e-12);
    }
}

#[test]
fn ghz_z_outcomes_are_correlated() {
    let mut log = TruncationLog::new();
    let mut m = Mps::zero_state(3).unwrap();
    m.apply_single_qubit_gate(&hadamard(), 0).unwrap();
    m.apply_cnot(0, 1, &mut log).unwrap();
    m.apply_cnot(1, 2, &mut log).unwrap();
    let rec = sample_outcomes(&m, &ProductPovm::pauli6(3), 20_000, 5, "rho").unwrap();
    let mut z_only = 0;
    for i in 0..rec.shots() {
        let s = rec.shot(i);
        if s.iter().all(|&a| a < 2) {
            z_only += 1;
            assert!(s.iter().all(|&a| a == s[0]), "mixed z outcomes {s:?}");
        }
    }
    assert!(z_only > 0);
}

#[test]
fn noisy_lpdo_sampling_matches_born_rule() {
    let (tn, dense, _) = run_circuit(3, 3, 0.2, TruncationCaps::unbounded(), 77);
    let povm = ProductPovm::pauli6(3);
    let exact = qoverlap::dense::born_probabilities(&dense, &povm).unwrap();
    let emp = sample_outcomes(&tn, &povm, 200_000, 9, "rho").unwrap().histogram().unwrap();
    let tv: f64 = exact.probs().iter().zip(emp.probs()).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
    assert!(tv < 0.02, "TV distance {tv}");
}
