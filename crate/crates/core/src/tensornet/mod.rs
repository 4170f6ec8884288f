//! Tensor-network states: matrix product states for pure states and locally
//! purified density operators (`ρ = X X†`) for noisy evolution.
//!
//! Every SVD truncation records its discarded weight
//! `δ = (Σ_discarded s_i²)^{1/2}` in a [`TruncationLog`]. Because each
//! truncation happens at the orthogonality center of a normalized
//! purification, the purification moves by exactly `√(2(1 − √(1 − δ²)))` in
//! 2-norm; gates and channels act isometrically on `X`, so these distances
//! add up and give the runtime fidelity bound of [`fidelity_lower_bound`].

mod chain;
mod sampling;
mod tensor;

use serde::{Deserialize, Serialize};

use crate::channel::KrausSet;
use crate::dense::{random_site_tensors, DenseState, RandomStateSpec};
use crate::error::{Error, Result};
use crate::estimator::{sample_outcomes, SampleRecord};
use crate::linalg::{self, CMatrix};
use crate::povm::ProductPovm;
use crate::rng::rng_from_seed;
use crate::{C64, DENSE_MAX_QUBITS};

pub use chain::{truncate_svd, Truncated};
use sampling::ChainSampler;

use chain::Chain;
use tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruncationKind {
    Bond,
    Kraus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationEntry {
    pub kind: TruncationKind,
    pub site: usize,
    pub delta: f64,
}

/// Ordered discarded weights of every truncation applied to a state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TruncationLog {
    entries: Vec<TruncationEntry>,
}

impl TruncationLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: TruncationKind, site: usize, delta: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::param(format!("discarded weight {delta} outside [0, 1]")));
        }
        self.entries.push(TruncationEntry { kind, site, delta });
        Ok(())
    }

    pub fn entries(&self) -> &[TruncationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn fidelity_lower_bound(&self) -> Result<f64> {
        fidelity_lower_bound(self.entries.iter().map(|e| e.delta))
    }
}

/// `F ≥ 1 − ½ (Σ_d √(2(1 − √(1 − δ_d²))))²`, clamped at zero.
pub fn fidelity_lower_bound(deltas: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut sum = 0.0;
    for d in deltas {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::param(format!("discarded weight {d} outside [0, 1]")));
        }
        sum += (2.0 * (1.0 - (1.0 - d * d).sqrt())).sqrt();
    }
    Ok((1.0 - 0.5 * sum * sum).max(0.0))
}

/// Caps on the bond (`D`) and Kraus (`K`) dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationCaps {
    pub max_bond: usize,
    pub max_kraus: usize,
}

impl TruncationCaps {
    pub fn new(max_bond: usize, max_kraus: usize) -> Result<Self> {
        if max_bond < 1 || max_kraus < 1 {
            return Err(Error::param("truncation caps must be at least 1"));
        }
        Ok(TruncationCaps { max_bond, max_kraus })
    }

    pub fn unbounded() -> Self {
        TruncationCaps { max_bond: usize::MAX, max_kraus: usize::MAX }
    }
}

impl Default for TruncationCaps {
    fn default() -> Self {
        TruncationCaps { max_bond: 16, max_kraus: 8 }
    }
}

/// Which qubits of a CNOT receive the depolarizing channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisePlacement {
    #[default]
    BothQubits,
    TargetOnly,
}

pub fn swap_matrix() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// CNOT on two adjacent sites, indexed `2 p_left + p_right`.
pub fn cnot_matrix(control_first: bool) -> CMatrix {
    let one = C64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(4, 4);
    // basis index 2 p_left + p_right
    for left in 0..2 {
        for right in 0..2 {
            let (l2, r2) = if control_first { (left, right ^ left) } else { (left ^ right, right) };
            m[(2 * l2 + r2, 2 * left + right)] = one;
        }
    }
    m
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    if u.shape() != (2, 2) {
        return Err(Error::DimensionMismatch { expected: 2, got: u.nrows() });
    }
    let d = linalg::unitarity_defect(u);
    if d > 1e-10 {
        return Err(Error::NotUnitary(d));
    }
    Ok(())
}

fn adjacent_pair(n: usize, control: usize, target: usize) -> Result<(usize, bool)> {
    if control >= n || target >= n {
        return Err(Error::param(format!("sites ({control}, {target}) out of range for {n} qubits")));
    }
    if control.abs_diff(target) != 1 {
        return Err(Error::NonAdjacent(control, target));
    }
    Ok((control.min(target), control < target))
}

/// Matrix product state of `n` qubits.
#[derive(Clone, Debug)]
pub struct Mps {
    chain: Chain,
    max_bond: usize,
}

impl Mps {
    /// Random MPS with i.i.d. complex Gaussian local tensors; represents the
    /// same state as [`crate::dense::random_pure_state`] for the same spec.
    pub fn random(spec: &RandomStateSpec) -> Result<Self> {
        let sites = random_site_tensors(spec)?
            .into_iter()
            .map(|(dl, dr, data)| Tensor::from_data(&[dl, 2, 1, dr], data))
            .collect();
        Ok(Mps { chain: Chain::new(sites)?, max_bond: usize::MAX })
    }

    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis_state(&vec![0; n])
    }

    pub fn basis_state(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::param("state must have at least one qubit"));
        }
        let sites = bits
            .iter()
            .map(|&b| {
                let mut t = Tensor::zeros(&[1, 2, 1, 1]);
                t.data[(b & 1) as usize] = C64::new(1.0, 0.0);
                t
            })
            .collect();
        Ok(Mps { chain: Chain::new(sites)?, max_bond: usize::MAX })
    }

    /// Exact MPS of a dense pure state by successive SVDs.
    pub fn from_dense(state: &DenseState) -> Result<Self> {
        let amps = state
            .amplitudes()
            .ok_or_else(|| Error::InvalidState("MPS requires a pure state".into()))?;
        let n = state.n();
        let mut sites = Vec::with_capacity(n);
        let mut rest = CMatrix::from_row_slice(1, amps.len(), amps.as_slice());
        for k in 0..n {
            let dl = rest.nrows();
            let cols = rest.ncols() / 2;
            // rows (l, p), cols remaining qubits
            let m = CMatrix::from_fn(dl * 2, cols, |row, c| rest[(row / 2, (row % 2) * cols + c)]);
            if k + 1 == n {
                sites.push(Tensor::from_matrix(&m, &[dl, 2, 1, 1]));
                break;
            }
            let (u, s, vt) = linalg::svd_sorted(&m);
            let keep = s.iter().take_while(|&&x| x > chain::RANK_RTOL * s[0]).count().max(1);
            sites.push(Tensor::from_matrix(&u.columns(0, keep).into_owned(), &[dl, 2, 1, keep]));
            let mut r = vt.rows(0, keep).into_owned();
            for (i, &x) in s[..keep].iter().enumerate() {
                for j in 0..r.ncols() {
                    r[(i, j)] *= x;
                }
            }
            rest = r;
        }
        Ok(Mps { chain: Chain::new(sites)?, max_bond: usize::MAX })
    }

    pub fn concat(parts: &[&Mps]) -> Result<Self> {
        let chains: Vec<&Chain> = parts.iter().map(|m| &m.chain).collect();
        let max_bond = parts.iter().map(|m| m.max_bond).min().unwrap_or(usize::MAX);
        Ok(Mps { chain: Chain::concat(&chains)?, max_bond })
    }

    pub fn with_max_bond(mut self, max_bond: usize) -> Result<Self> {
        if max_bond < 1 {
            return Err(Error::param("bond cap must be at least 1"));
        }
        self.max_bond = max_bond;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.chain.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.chain.bond_dims()
    }

    pub fn norm(&self) -> f64 {
        self.chain.norm_sqr().sqrt()
    }

    pub fn apply_single_qubit_gate(&mut self, u: &CMatrix, site: usize) -> Result<()> {
        check_unitary(u)?;
        if site >= self.n() {
            return Err(Error::param(format!("site {site} out of range")));
        }
        self.chain.apply_single(site, u);
        Ok(())
    }

    /// A noiseless two-qubit unitary on sites `left` and `left + 1`; the
    /// matrix index is `2 p_left + p_right`.
    pub fn apply_two_qubit_gate(&mut self, u: &CMatrix, left: usize, log: &mut TruncationLog) -> Result<()> {
        if u.shape() != (4, 4) {
            return Err(Error::DimensionMismatch { expected: 4, got: u.nrows() });
        }
        let d = linalg::unitarity_defect(u);
        if d > 1e-10 {
            return Err(Error::NotUnitary(d));
        }
        if left + 1 >= self.n() {
            return Err(Error::param(format!("site pair ({left}, {}) out of range", left + 1)));
        }
        let caps = TruncationCaps { max_bond: self.max_bond, max_kraus: 1 };
        self.chain.apply_two_site(left, u, [None, None], caps, log)
    }

    /// Noiseless CNOT between adjacent sites.
    pub fn apply_cnot(&mut self, control: usize, target: usize, log: &mut TruncationLog) -> Result<()> {
        let (s, control_first) = adjacent_pair(self.n(), control, target)?;
        let caps = TruncationCaps { max_bond: self.max_bond, max_kraus: 1 };
        self.chain.apply_two_site(s, &cnot_matrix(control_first), [None, None], caps, log)
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        if self.n() > DENSE_MAX_QUBITS {
            return Err(Error::TooManyQubits { n: self.n(), max: DENSE_MAX_QUBITS });
        }
        let amps = self.chain.amplitudes().expect("MPS has unit Kraus dimension");
        DenseState::from_pure_normalized(nalgebra::DVector::from_vec(amps))
    }

    pub fn into_lpdo(self, caps: TruncationCaps) -> Lpdo {
        Lpdo { chain: self.chain, caps }
    }

    pub(crate) fn chain(&self) -> &Chain {
        &self.chain
    }
}

/// Locally purified density operator.
#[derive(Clone, Debug)]
pub struct Lpdo {
    chain: Chain,
    caps: TruncationCaps,
}

/// Depolarizing noise attached to a CNOT.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnotNoise {
    pub lambda: f64,
    pub placement: NoisePlacement,
}

impl Lpdo {
    pub fn from_mps(mps: Mps, caps: TruncationCaps) -> Self {
        mps.into_lpdo(caps)
    }

    pub fn n(&self) -> usize {
        self.chain.len()
    }

    pub fn caps(&self) -> TruncationCaps {
        self.caps
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.chain.bond_dims()
    }

    pub fn kraus_dims(&self) -> Vec<usize> {
        self.chain.kraus_dims()
    }

    /// `Tr ρ = ‖X‖²`.
    pub fn trace(&self) -> f64 {
        self.chain.norm_sqr()
    }

    pub fn apply_single_qubit_gate(&mut self, u: &CMatrix, site: usize) -> Result<()> {
        check_unitary(u)?;
        if site >= self.n() {
            return Err(Error::param(format!("site {site} out of range")));
        }
        self.chain.apply_single(site, u);
        Ok(())
    }

    /// CNOT on adjacent sites followed by depolarizing channels with factor
    /// `lambda` on both qubits.
    pub fn apply_cnot(&mut self, control: usize, target: usize, lambda: f64, log: &mut TruncationLog) -> Result<()> {
        self.apply_cnot_with(control, target, CnotNoise { lambda, placement: NoisePlacement::BothQubits }, log)
    }

    pub fn apply_cnot_with(&mut self, control: usize, target: usize, noise: CnotNoise, log: &mut TruncationLog) -> Result<()> {
        let (s, control_first) = adjacent_pair(self.n(), control, target)?;
        let ch = if noise.lambda > 0.0 { Some(KrausSet::depolarizing(noise.lambda)?) } else { None };
        let target_is_left = !control_first;
        let channels = match (&ch, noise.placement) {
            (None, _) => [None, None],
            (Some(k), NoisePlacement::BothQubits) => [Some(k), Some(k)],
            (Some(k), NoisePlacement::TargetOnly) if target_is_left => [Some(k), None],
            (Some(k), NoisePlacement::TargetOnly) => [None, Some(k)],
        };
        self.chain.apply_two_site(s, &cnot_matrix(control_first), channels, self.caps, log)
    }

    pub fn apply_channel(&mut self, site: usize, kraus: &KrausSet, log: &mut TruncationLog) -> Result<()> {
        if site >= self.n() {
            return Err(Error::param(format!("site {site} out of range")));
        }
        self.chain.apply_channel(site, kraus, self.caps, log)
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        if self.n() > DENSE_MAX_QUBITS {
            return Err(Error::TooManyQubits { n: self.n(), max: DENSE_MAX_QUBITS });
        }
        Ok(DenseState::mixed_unchecked(self.chain.density_matrix()))
    }

    pub(crate) fn chain(&self) -> &Chain {
        &self.chain
    }
}

/// A tensor-network state that is promoted from MPS to LPDO on the first
/// noisy operation.
#[derive(Clone, Debug)]
pub enum TnState {
    Mps(Mps),
    Lpdo(Lpdo),
}

impl TnState {
    pub fn n(&self) -> usize {
        match self {
            TnState::Mps(m) => m.n(),
            TnState::Lpdo(l) => l.n(),
        }
    }

    pub fn apply_single_qubit_gate(&mut self, u: &CMatrix, site: usize) -> Result<()> {
        match self {
            TnState::Mps(m) => m.apply_single_qubit_gate(u, site),
            TnState::Lpdo(l) => l.apply_single_qubit_gate(u, site),
        }
    }

    /// CNOT with optional depolarizing noise; an MPS receiving noise is
    /// promoted to an LPDO with the given caps.
    pub fn apply_cnot(&mut self, control: usize, target: usize, noise: CnotNoise, caps: TruncationCaps, log: &mut TruncationLog) -> Result<()> {
        if noise.lambda > 0.0 {
            if let TnState::Mps(m) = self {
                let mps = std::mem::replace(m, Mps::zero_state(1)?);
                *self = TnState::Lpdo(mps.into_lpdo(caps));
            }
        }
        match self {
            TnState::Mps(m) => m.apply_cnot(control, target, log),
            TnState::Lpdo(l) => l.apply_cnot_with(control, target, noise, log),
        }
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        match self {
            TnState::Mps(m) => m.to_dense(),
            TnState::Lpdo(l) => l.to_dense(),
        }
    }

    pub(crate) fn chain(&self) -> &Chain {
        match self {
            TnState::Mps(m) => m.chain(),
            TnState::Lpdo(l) => l.chain(),
        }
    }
}

/// Draws flat outcome tuples from a chain by exact site-by-site
/// conditional sampling.
pub(crate) fn sample_chain(chain: &Chain, povm: &ProductPovm, shots: usize, seed: u64) -> Result<Vec<u8>> {
    if povm.n() != chain.len() {
        return Err(Error::DimensionMismatch { expected: chain.len(), got: povm.n() });
    }
    let mut sampler = ChainSampler::new(chain, povm.factor().elements());
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(shots * chain.len());
    for _ in 0..shots {
        sampler.sample_into(&mut rng, &mut out);
    }
    Ok(out)
}

/// Samples `shots` outcome tuples of `povm` from a tensor-network state.
pub fn sample_from_tn(state: &TnState, povm: &ProductPovm, shots: usize, seed: u64, source: &str) -> Result<SampleRecord> {
    sample_outcomes(state, povm, shots, seed, source)
}

/// Exact probability of one outcome tuple under a tensor-network state.
pub fn tuple_probability(state: &TnState, povm: &ProductPovm, tuple: &[usize]) -> Result<f64> {
    if tuple.len() != state.n() || povm.n() != state.n() {
        return Err(Error::DimensionMismatch { expected: state.n(), got: tuple.len() });
    }
    if tuple.iter().any(|&a| a >= povm.outcomes_per_qubit()) {
        return Err(Error::param("outcome index outside POVM range"));
    }
    let sampler = ChainSampler::new(state.chain(), povm.factor().elements());
    Ok(sampler.probability(tuple))
}
