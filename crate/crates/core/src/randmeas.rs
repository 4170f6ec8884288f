//! Randomized-measurement baseline: both states are measured in the same
//! random local bases and the overlap is read off the cross-correlations,
//!
//! `Tr(ρσ) ≈ 2ⁿ mean_r Σ_{s,s'} (−2)^{−D(s,s')} P̂_ρ⁽ʳ⁾(s) P̂_σ⁽ʳ⁾(s')`,
//!
//! with `D` the Hamming distance. Per qubit the kernel `2 (−2)^{−D}` is the
//! matrix `[[2, −1], [−1, 2]]`, so each setting is one histogram contraction.

use rand_distr::{Distribution, StandardNormal};

use crate::dense::{born_probabilities, DenseState};
use crate::error::{Error, Result};
use crate::estimator::{contract_distributions, mean_var, sample_outcomes, EstimateResult, StateRef};
use crate::linalg::CMatrix;
use crate::povm::{computational_basis, ProductPovm};
use crate::rng::{rng_from_seed, split_path, Rng};
use crate::C64;

const KERNEL: [f64; 4] = [2.0, -1.0, -1.0, 2.0];

/// Shared measurement settings for both states.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomMeasSettings {
    n: usize,
    shots_per_setting: usize,
    /// `unitaries[r][k]` rotates qubit `k` in setting `r`.
    unitaries: Vec<Vec<CMatrix>>,
    seed: u64,
}

impl RandomMeasSettings {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn settings(&self) -> usize {
        self.unitaries.len()
    }

    pub fn shots_per_setting(&self) -> usize {
        self.shots_per_setting
    }

    pub fn unitaries(&self) -> &[Vec<CMatrix>] {
        &self.unitaries
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn total_shots(&self) -> usize {
        self.settings() * self.shots_per_setting
    }
}

/// Haar-random element of SU(2) from a normalized Gaussian 4-vector.
pub fn haar_su2(rng: &mut Rng) -> CMatrix {
    let mut v = [0.0f64; 4];
    for x in v.iter_mut() {
        *x = StandardNormal.sample(rng);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = v.map(|x| x / norm);
    CMatrix::from_row_slice(2, 2, &[C64::new(a, b), C64::new(-c, d), C64::new(c, d), C64::new(a, -b)])
}

/// `settings` independent draws of `n` Haar-random single-qubit unitaries.
pub fn generate_settings(n: usize, settings: usize, shots_per_setting: usize, seed: u64) -> Result<RandomMeasSettings> {
    if n == 0 || settings == 0 || shots_per_setting == 0 {
        return Err(Error::param("qubits, settings and shots per setting must all be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let unitaries = (0..settings).map(|_| (0..n).map(|_| haar_su2(&mut rng)).collect()).collect();
    Ok(RandomMeasSettings { n, shots_per_setting, unitaries, seed })
}

fn rotated_record(state: StateRef<'_>, us: &[CMatrix], shots: usize, seed: u64) -> Result<Vec<f64>> {
    let n = us.len();
    let povm = ProductPovm::new(computational_basis(), n);
    let record = match state {
        StateRef::Dense(s) => {
            let mut r = s.clone();
            for (k, u) in us.iter().enumerate() {
                r = r.apply_unitary(u, &[k])?;
            }
            sample_outcomes(&r, &povm, shots, seed, "rm")?
        }
        StateRef::Mps(s) => {
            let mut r = s.clone();
            for (k, u) in us.iter().enumerate() {
                r.apply_single_qubit_gate(u, k)?;
            }
            sample_outcomes(&r, &povm, shots, seed, "rm")?
        }
        StateRef::Lpdo(s) => {
            let mut r = s.clone();
            for (k, u) in us.iter().enumerate() {
                r.apply_single_qubit_gate(u, k)?;
            }
            sample_outcomes(&r, &povm, shots, seed, "rm")?
        }
    };
    Ok(record.histogram()?.probs().to_vec())
}

/// Randomized-measurement estimate of `Tr(ρσ)`. The two states are sampled
/// by independent samplers sharing only the settings; the standard error
/// is the spread over settings.
pub fn estimate_overlap_rm<'a, 'b>(rho: impl Into<StateRef<'a>>, sigma: impl Into<StateRef<'b>>, settings: &RandomMeasSettings) -> Result<EstimateResult> {
    let (rho, sigma) = (rho.into(), sigma.into());
    for s in [&rho, &sigma] {
        if s.n() != settings.n {
            return Err(Error::DimensionMismatch { expected: settings.n, got: s.n() });
        }
    }
    let n = settings.n;
    let mut values = Vec::with_capacity(settings.settings());
    for (r, us) in settings.unitaries.iter().enumerate() {
        let pr = rotated_record(rho, us, settings.shots_per_setting, split_path(settings.seed, &[1, r as u64]))?;
        let ps = rotated_record(sigma, us, settings.shots_per_setting, split_path(settings.seed, &[2, r as u64]))?;
        values.push(contract_distributions(&pr, &ps, n, 2, &KERNEL));
    }
    let count = values.len();
    let (mean, var) = mean_var(values);
    Ok(EstimateResult { mean, stderr: (var / count as f64).sqrt(), shots: settings.total_shots() })
}

/// The same average with exact rotated Born distributions in place of the
/// empirical ones.
pub fn rm_expectation_dense(rho: &DenseState, sigma: &DenseState, settings: &RandomMeasSettings) -> Result<f64> {
    let n = settings.n;
    if rho.n() != n || sigma.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rho.n().max(sigma.n()) });
    }
    let povm = ProductPovm::new(computational_basis(), n);
    let mut total = 0.0;
    for us in &settings.unitaries {
        let (mut r, mut s) = (rho.clone(), sigma.clone());
        for (k, u) in us.iter().enumerate() {
            r = r.apply_unitary(u, &[k])?;
            s = s.apply_unitary(u, &[k])?;
        }
        let pr = born_probabilities(&r, &povm)?;
        let ps = born_probabilities(&s, &povm)?;
        total += contract_distributions(pr.probs(), ps.probs(), n, 2, &KERNEL);
    }
    Ok(total / settings.settings() as f64)
}
