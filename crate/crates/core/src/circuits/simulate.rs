use rand::Rng as _;
use rand_distr::{Distribution, WeightedAliasIndex};
use serde::{Deserialize, Serialize};

use super::{Circuit, Gate, Layout, TestKind};
use crate::channel::KrausSet;
use crate::dense::{apply_channel_dense, DenseState};
use crate::error::{Error, Result};
use crate::estimator::{mean_var, sample_outcomes, EstimateResult};
use crate::linalg::{self, CMatrix};
use crate::povm::{computational_basis, ProductPovm};
use crate::rng::{rng_from_seed, split};
use crate::tensornet::{cnot_matrix, swap_matrix, CnotNoise, Mps, NoisePlacement, TnState, TruncationCaps, TruncationLog};
use crate::DENSE_MAX_QUBITS;

/// Depolarizing noise after every CNOT and independent readout bit flips;
/// single-qubit gates are noiseless.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub cnot_lambda: f64,
    pub readout_flip: f64,
    pub placement: NoisePlacement,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { cnot_lambda: 0.005, readout_flip: 0.01, placement: NoisePlacement::BothQubits }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { cnot_lambda: 0.0, readout_flip: 0.0, placement: NoisePlacement::BothQubits }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("cnot_lambda", self.cnot_lambda), ("readout_flip", self.readout_flip)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn cnot(&self) -> CnotNoise {
        CnotNoise { lambda: self.cnot_lambda, placement: self.placement }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitEstimate {
    pub estimate: EstimateResult,
    /// Certified fidelity of the simulated output state.
    pub fidelity_lower_bound: f64,
    pub truncations: usize,
}

fn recognized(circ: &Circuit) -> Result<(TestKind, &Layout)> {
    circ.test().map(|(k, l)| (*k, l)).ok_or(Error::UnrecognizedCircuit)
}

/// Value of one measured bitstring (`bits[q]` for line position `q`).
fn shot_value(kind: TestKind, layout: &Layout, bits: &[u8]) -> f64 {
    match kind {
        TestKind::Ancilla => {
            if bits[layout.ancilla.expect("ancilla test")] == 0 {
                1.0
            } else {
                -1.0
            }
        }
        TestKind::Bell => {
            let odd = layout.reg_a.iter().zip(&layout.reg_b).filter(|(&a, &b)| bits[a] & bits[b] == 1).count();
            if odd % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Adjacent transpositions that move logical qubit `j` (ancilla, A, B
/// order) from line position `j` to `positions[j]`.
fn placement_swaps(positions: &[usize]) -> Vec<usize> {
    let mut at: Vec<usize> = (0..positions.len()).collect();
    let mut swaps = Vec::new();
    for pass in 0..at.len() {
        for p in 0..at.len() - 1 - pass.min(at.len() - 1) {
            if positions[at[p]] > positions[at[p + 1]] {
                at.swap(p, p + 1);
                swaps.push(p);
            }
        }
    }
    swaps
}

/// Runs an overlap-test circuit on `ρ ⊗ σ` with the LPDO simulator and
/// estimates the overlap from `shots` noisy readouts.
pub fn estimate_overlap_via_circuit(
    circ: &Circuit,
    rho: &Mps,
    sigma: &Mps,
    noise: &NoiseModel,
    caps: TruncationCaps,
    shots: usize,
    seed: u64,
) -> Result<CircuitEstimate> {
    noise.validate()?;
    let (kind, layout) = recognized(circ)?;
    if rho.n() != layout.n() || sigma.n() != layout.n() {
        return Err(Error::DimensionMismatch { expected: layout.n(), got: rho.n().max(sigma.n()) });
    }
    if shots == 0 {
        return Err(Error::param("shot count must be at least 1"));
    }
    let circ = if circ.is_nearest_neighbour() { circ.clone() } else { circ.routed()? };
    let zero = Mps::zero_state(1)?;
    let mut parts = Vec::new();
    if layout.ancilla.is_some() {
        parts.push(&zero);
    }
    parts.push(rho);
    parts.push(sigma);
    let mut joint = Mps::concat(&parts)?;
    let mut log = TruncationLog::new();
    for p in placement_swaps(&layout.positions()) {
        joint.apply_two_qubit_gate(&swap_matrix(), p, &mut log)?;
    }
    let mut state = TnState::Mps(joint);
    for g in circ.gates() {
        match *g {
            Gate::Single { gate, qubit } => state.apply_single_qubit_gate(&gate.matrix(), qubit)?,
            Gate::Cnot { control, target } => state.apply_cnot(control, target, noise.cnot(), caps, &mut log)?,
        }
    }
    let povm = ProductPovm::new(computational_basis(), circ.width());
    let record = sample_outcomes(&state, &povm, shots, split(seed, 1), "circuit")?;
    Ok(CircuitEstimate {
        estimate: read_out(kind, layout, noise, record.outcomes(), circ.width(), seed),
        fidelity_lower_bound: log.fidelity_lower_bound()?,
        truncations: log.len(),
    })
}

/// Same protocol as [`estimate_overlap_via_circuit`] on an exact density
/// matrix; practical up to about ten lines. No truncation takes place, so
/// the fidelity bound is 1.
pub fn estimate_overlap_via_circuit_dense(
    circ: &Circuit,
    rho: &DenseState,
    sigma: &DenseState,
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
) -> Result<CircuitEstimate> {
    if shots == 0 {
        return Err(Error::param("shot count must be at least 1"));
    }
    let (kind, layout) = recognized(circ)?;
    let width = circ.width();
    let probs = output_probabilities(circ, rho, sigma, noise)?;
    let alias = WeightedAliasIndex::new(probs).map_err(|e| Error::InvalidState(format!("unusable circuit output distribution: {e}")))?;
    let mut rng = rng_from_seed(split(seed, 1));
    let mut outcomes = vec![0u8; shots * width];
    for shot in outcomes.chunks_mut(width) {
        let x = alias.sample(&mut rng);
        for (q, b) in shot.iter_mut().enumerate() {
            *b = ((x >> (width - 1 - q)) & 1) as u8;
        }
    }
    Ok(CircuitEstimate { estimate: read_out(kind, layout, noise, &outcomes, width, seed), fidelity_lower_bound: 1.0, truncations: 0 })
}

/// Readout flips then per-shot values for `shots × width` measured bits.
fn read_out(kind: TestKind, layout: &Layout, noise: &NoiseModel, outcomes: &[u8], width: usize, seed: u64) -> EstimateResult {
    let mut rng = rng_from_seed(split(seed, 2));
    let mut bits = vec![0u8; width];
    let shots = outcomes.len() / width;
    let mut values = Vec::with_capacity(shots);
    for shot in outcomes.chunks(width) {
        bits.copy_from_slice(shot);
        if noise.readout_flip > 0.0 {
            for b in bits.iter_mut() {
                if rng.gen::<f64>() < noise.readout_flip {
                    *b ^= 1;
                }
            }
        }
        values.push(shot_value(kind, layout, &bits));
    }
    let (mean, var) = mean_var(values);
    EstimateResult { mean, stderr: (var / shots as f64).sqrt(), shots }
}

/// Computational-basis distribution of the noisy circuit before readout.
fn output_probabilities(circ: &Circuit, rho: &DenseState, sigma: &DenseState, noise: &NoiseModel) -> Result<Vec<f64>> {
    noise.validate()?;
    let (_, layout) = recognized(circ)?;
    if rho.n() != layout.n() || sigma.n() != layout.n() {
        return Err(Error::DimensionMismatch { expected: layout.n(), got: rho.n().max(sigma.n()) });
    }
    let width = circ.width();
    if width > DENSE_MAX_QUBITS {
        return Err(Error::TooManyQubits { n: width, max: DENSE_MAX_QUBITS });
    }
    let circ = if circ.is_nearest_neighbour() { circ.clone() } else { circ.routed()? };
    let mut joint = rho.density_matrix();
    joint = linalg::kron(&joint, &sigma.density_matrix());
    if layout.ancilla.is_some() {
        let mut zero = CMatrix::zeros(2, 2);
        zero[(0, 0)] = crate::C64::new(1.0, 0.0);
        joint = linalg::kron(&zero, &joint);
    }
    let mut state = DenseState::mixed_unchecked(permute_qubits(&joint, &layout.positions()));
    let channel = if noise.cnot_lambda > 0.0 { Some(KrausSet::depolarizing(noise.cnot_lambda)?) } else { None };
    let cx = cnot_matrix(true);
    for g in circ.gates() {
        match *g {
            Gate::Single { gate, qubit } => state = state.apply_unitary(&gate.matrix(), &[qubit])?,
            Gate::Cnot { control, target } => {
                state = state.apply_unitary(&cx, &[control, target])?;
                if let Some(ch) = &channel {
                    let noisy: &[usize] = match noise.placement {
                        NoisePlacement::BothQubits => &[control, target],
                        NoisePlacement::TargetOnly => &[target],
                    };
                    for &q in noisy {
                        state = apply_channel_dense(&state, ch, q)?;
                    }
                }
            }
        }
    }
    let dm = state.density_matrix();
    Ok((0..dm.nrows()).map(|i| dm[(i, i)].re.max(0.0)).collect())
}

/// Infinite-shot limit of [`estimate_overlap_via_circuit`], by dense
/// density-matrix simulation of the same noisy circuit and readout.
pub fn circuit_expectation_dense(circ: &Circuit, rho: &DenseState, sigma: &DenseState, noise: &NoiseModel) -> Result<f64> {
    let mut probs = output_probabilities(circ, rho, sigma, noise)?;
    let (kind, layout) = recognized(circ)?;
    let width = circ.width();
    if noise.readout_flip > 0.0 {
        let f = noise.readout_flip;
        for q in 0..width {
            let mask = 1usize << (width - 1 - q);
            let old = probs.clone();
            for (x, p) in probs.iter_mut().enumerate() {
                *p = (1.0 - f) * old[x] + f * old[x ^ mask];
            }
        }
    }
    let mut bits = vec![0u8; width];
    let mut total = 0.0;
    for (x, p) in probs.iter().enumerate() {
        for (q, b) in bits.iter_mut().enumerate() {
            *b = ((x >> (width - 1 - q)) & 1) as u8;
        }
        total += p * shot_value(kind, layout, &bits);
    }
    Ok(total)
}

/// Moves logical qubit `j` (most significant first) to line position
/// `positions[j]`.
fn permute_qubits(m: &CMatrix, positions: &[usize]) -> CMatrix {
    let w = positions.len();
    let map = |x: usize| -> usize {
        let mut y = 0;
        for (j, &p) in positions.iter().enumerate() {
            if (x >> (w - 1 - j)) & 1 == 1 {
                y |= 1 << (w - 1 - p);
            }
        }
        y
    };
    let idx: Vec<usize> = (0..m.nrows()).map(map).collect();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out[(idx[r], idx[c])] = m[(r, c)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swaps_realize_the_layout() {
        for positions in [vec![0, 2, 1, 3], vec![0, 1, 3, 5, 2, 4, 6], vec![3, 2, 1, 0]] {
            let mut at: Vec<usize> = (0..positions.len()).collect();
            for p in placement_swaps(&positions) {
                at.swap(p, p + 1);
            }
            for (p, &j) in at.iter().enumerate() {
                assert_eq!(positions[j], p);
            }
        }
    }
}
