//! Exact dense states for small qubit counts.
//!
//! Everything here is deliberately simple and slow: these routines are the
//! ground truth the tensor-network and sampling code is checked against.
//! Basis index convention: qubit 0 is the most significant bit.

use nalgebra::DVector;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::povm::{OutcomeDistribution, ProductPovm};
use crate::rng::{rng_from_seed, Rng};
use crate::{C64, DENSE_MAX_QUBITS};

const PURE_NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    Pure(DVector<C64>),
    Mixed(CMatrix),
}

/// An exact `n`-qubit state, either a state vector or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    kind: StateKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    Product,
    Entangled,
}

impl StateFamily {
    pub fn name(self) -> &'static str {
        match self {
            StateFamily::Product => "product",
            StateFamily::Entangled => "entangled",
        }
    }
}

/// Parameters of a random matrix-product pure state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStateSpec {
    pub n: usize,
    pub family: StateFamily,
    pub bond_dim: usize,
    pub seed: u64,
}

impl RandomStateSpec {
    pub const DEFAULT_ENTANGLED_BOND: usize = 2;

    pub fn product(n: usize, seed: u64) -> Self {
        RandomStateSpec { n, family: StateFamily::Product, bond_dim: 1, seed }
    }

    pub fn entangled(n: usize, seed: u64) -> Self {
        RandomStateSpec { n, family: StateFamily::Entangled, bond_dim: Self::DEFAULT_ENTANGLED_BOND, seed }
    }

    pub fn of_family(family: StateFamily, n: usize, seed: u64) -> Self {
        match family {
            StateFamily::Product => Self::product(n, seed),
            StateFamily::Entangled => Self::entangled(n, seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("state must have at least one qubit"));
        }
        if self.bond_dim < 1 {
            return Err(Error::param("bond dimension must be at least 1"));
        }
        match (self.family, self.bond_dim) {
            (StateFamily::Product, 1) => Ok(()),
            (StateFamily::Product, d) => Err(Error::param(format!("product family requires bond_dim 1, got {d}"))),
            (StateFamily::Entangled, 1) => Err(Error::param("entangled family requires bond_dim >= 2")),
            (StateFamily::Entangled, _) => Ok(()),
        }
    }
}

/// One site of a random matrix-product state: `(left dim, right dim, data)`
/// with data indexed `[l][p][r]`.
pub(crate) type SiteTensor = (usize, usize, Vec<C64>);

/// Draws the local tensors of a random MPS: i.i.d. standard complex Gaussian
/// entries, bond dimension `spec.bond_dim` on every internal bond.
pub(crate) fn random_site_tensors(spec: &RandomStateSpec) -> Result<Vec<SiteTensor>> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let mut sites = Vec::with_capacity(spec.n);
    for k in 0..spec.n {
        let dl = if k == 0 { 1 } else { spec.bond_dim };
        let dr = if k + 1 == spec.n { 1 } else { spec.bond_dim };
        let data = (0..dl * 2 * dr).map(|_| complex_gaussian(&mut rng)).collect();
        sites.push((dl, dr, data));
    }
    Ok(sites)
}

pub(crate) fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random normalized pure state obtained by contracting random local tensors.
pub fn random_pure_state(spec: &RandomStateSpec) -> Result<DenseState> {
    if spec.n > DENSE_MAX_QUBITS {
        return Err(Error::TooManyQubits { n: spec.n, max: DENSE_MAX_QUBITS });
    }
    let sites = random_site_tensors(spec)?;
    // running amplitudes indexed [prefix][right bond]
    let mut amps = vec![C64::new(1.0, 0.0)];
    let mut bond = 1;
    for (dl, dr, data) in &sites {
        debug_assert_eq!(*dl, bond);
        let prefixes = amps.len() / bond;
        let mut next = vec![C64::new(0.0, 0.0); prefixes * 2 * dr];
        for pre in 0..prefixes {
            for l in 0..*dl {
                let a = amps[pre * bond + l];
                for p in 0..2 {
                    for r in 0..*dr {
                        next[(pre * 2 + p) * dr + r] += a * data[(l * 2 + p) * dr + r];
                    }
                }
            }
        }
        amps = next;
        bond = *dr;
    }
    DenseState::from_pure_normalized(DVector::from_vec(amps))
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl DenseState {
    pub fn from_pure(v: DVector<C64>) -> Result<Self> {
        let n = qubits_for_dim(v.len())?;
        let norm2 = v.norm_squared();
        if (norm2 - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::InvalidState(format!("state vector has squared norm {norm2}")));
        }
        Ok(DenseState { n, kind: StateKind::Pure(v) })
    }

    pub fn from_pure_normalized(v: DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        let n = qubits_for_dim(v.len())?;
        Ok(DenseState { n, kind: StateKind::Pure(v / C64::new(norm, 0.0)) })
    }

    pub fn from_density(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let n = qubits_for_dim(rho.nrows())?;
        let herm = linalg::max_abs_diff_c(&rho, &rho.adjoint());
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({herm:.2e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix has trace {tr}")));
        }
        let (vals, _) = linalg::hermitian_eigen(&rho);
        if vals[0] < -EIGEN_TOL {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {}", vals[0])));
        }
        Ok(DenseState { n, kind: StateKind::Mixed(rho) })
    }

    /// Wraps a density matrix produced by trusted internal arithmetic,
    /// re-Hermitizing it without re-validating.
    pub(crate) fn mixed_unchecked(rho: CMatrix) -> Self {
        let n = rho.nrows().trailing_zeros() as usize;
        let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        DenseState { n, kind: StateKind::Mixed(rho) }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > DENSE_MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: DENSE_MAX_QUBITS });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::param(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(DenseState { n, kind: StateKind::Pure(v) })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n > DENSE_MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: DENSE_MAX_QUBITS });
        }
        let dim = 1usize << n;
        Ok(DenseState { n, kind: StateKind::Mixed(CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0)) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn is_pure_kind(&self) -> bool {
        matches!(self.kind, StateKind::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.kind {
            StateKind::Pure(v) => Some(v),
            StateKind::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match &self.kind {
            StateKind::Pure(v) => v * v.adjoint(),
            StateKind::Mixed(m) => m.clone(),
        }
    }

    /// The same state in mixed (density-matrix) form.
    pub fn to_mixed(&self) -> DenseState {
        DenseState { n: self.n, kind: StateKind::Mixed(self.density_matrix()) }
    }

    pub fn trace(&self) -> f64 {
        match &self.kind {
            StateKind::Pure(v) => v.norm_squared(),
            StateKind::Mixed(m) => m.trace().re,
        }
    }

    /// Applies a `2^k × 2^k` operator to the listed qubits (first listed
    /// qubit is the most significant bit of the operator's index).
    pub fn apply_operator(&self, op: &CMatrix, qubits: &[usize]) -> Result<DenseState> {
        let k = qubits.len();
        if op.shape() != (1 << k, 1 << k) {
            return Err(Error::DimensionMismatch { expected: 1 << k, got: op.nrows() });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(Error::param(format!("qubit {q} out of range for {} qubits", self.n)));
            }
            if qubits[..i].contains(&q) {
                return Err(Error::param(format!("qubit {q} listed twice")));
            }
        }
        Ok(match &self.kind {
            StateKind::Pure(v) => {
                let m = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
                let out = left_apply(&m, op, qubits, self.n);
                DenseState { n: self.n, kind: StateKind::Pure(DVector::from_column_slice(out.as_slice())) }
            }
            StateKind::Mixed(rho) => DenseState { n: self.n, kind: StateKind::Mixed(conjugate(rho, op, qubits, self.n)) },
        })
    }

    pub fn apply_unitary(&self, u: &CMatrix, qubits: &[usize]) -> Result<DenseState> {
        let defect = linalg::unitarity_defect(u);
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        self.apply_operator(u, qubits)
    }

    /// Reduced density matrix of the listed qubits.
    pub fn reduced(&self, keep: &[usize]) -> CMatrix {
        let rho = self.density_matrix();
        let n = self.n;
        let k = keep.len();
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let mut out = CMatrix::zeros(1 << k, 1 << k);
        let compose = |kept: usize, other: usize| -> usize {
            let mut idx = 0usize;
            for (i, &q) in keep.iter().enumerate() {
                if (kept >> (k - 1 - i)) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (i, &q) in rest.iter().enumerate() {
                if (other >> (rest.len() - 1 - i)) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        for o in 0..(1usize << rest.len()) {
            for r in 0..(1usize << k) {
                for c in 0..(1usize << k) {
                    out[(r, c)] += rho[(compose(r, o), compose(c, o))];
                }
            }
        }
        out
    }
}

/// Applies `op` on `qubits` to the row index of `m` (i.e. computes `op · m`
/// with `op` embedded).
fn left_apply(m: &CMatrix, op: &CMatrix, qubits: &[usize], n: usize) -> CMatrix {
    let k = qubits.len();
    let sub = 1usize << k;
    let dim = 1usize << n;
    let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let full_mask: usize = masks.iter().sum();
    let offset = |j: usize| -> usize {
        let mut idx = 0;
        for (i, &mask) in masks.iter().enumerate() {
            if (j >> (k - 1 - i)) & 1 == 1 {
                idx |= mask;
            }
        }
        idx
    };
    let offsets: Vec<usize> = (0..sub).map(offset).collect();
    let mut out = m.clone();
    let mut buf = vec![C64::new(0.0, 0.0); sub];
    for base in 0..dim {
        if base & full_mask != 0 {
            continue;
        }
        for col in 0..m.ncols() {
            for (j, &off) in offsets.iter().enumerate() {
                buf[j] = m[(base | off, col)];
            }
            for (i, &off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, b) in buf.iter().enumerate() {
                    acc += op[(i, j)] * b;
                }
                out[(base | off, col)] = acc;
            }
        }
    }
    out
}

/// `op ρ op†` with `op` acting on `qubits`.
fn conjugate(rho: &CMatrix, op: &CMatrix, qubits: &[usize], n: usize) -> CMatrix {
    let left = left_apply(rho, op, qubits, n);
    // (op (op ρ)†)† = op ρ op† for Hermitian ρ; do it without assuming that
    let right = left_apply(&left.adjoint(), op, qubits, n);
    right.adjoint()
}

/// Exact `Tr(ρσ)`.
pub fn exact_overlap(rho: &DenseState, sigma: &DenseState) -> Result<f64> {
    if rho.n != sigma.n {
        return Err(Error::DimensionMismatch { expected: rho.n, got: sigma.n });
    }
    let val = match (&rho.kind, &sigma.kind) {
        (StateKind::Pure(a), StateKind::Pure(b)) => C64::new(a.dotc(b).norm_sqr(), 0.0),
        (StateKind::Pure(a), StateKind::Mixed(m)) | (StateKind::Mixed(m), StateKind::Pure(a)) => a.dotc(&(m * a)),
        (StateKind::Mixed(a), StateKind::Mixed(b)) => {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    acc += a[(i, j)] * b[(j, i)];
                }
            }
            acc
        }
    };
    debug_assert!(val.im.abs() < 1e-10, "overlap has imaginary residue {}", val.im);
    Ok(val.re)
}

/// Largest outcome-space size for which a full distribution is tabulated.
pub const MAX_OUTCOMES: usize = 1 << 24;

/// Largest `n` with `m^n ≤ MAX_OUTCOMES`.
pub fn max_tabulated_qubits(m: usize) -> usize {
    let mut n = 0;
    let mut size = 1usize;
    while m > 1 && size * m <= MAX_OUTCOMES {
        size *= m;
        n += 1;
    }
    n
}

/// Full Born distribution `P(a) = Tr(ρ M_a)` over all outcome tuples.
pub fn born_probabilities(rho: &DenseState, povm: &ProductPovm) -> Result<OutcomeDistribution> {
    if rho.n != povm.n() {
        return Err(Error::DimensionMismatch { expected: povm.n(), got: rho.n });
    }
    let n = rho.n;
    let m = povm.factor().len();
    let outcomes = m
        .checked_pow(n as u32)
        .filter(|&c| c <= MAX_OUTCOMES)
        .ok_or(Error::TooManyQubits { n, max: max_tabulated_qubits(m) })?;
    let dm = rho.density_matrix();
    let dim = 1usize << n;
    // interleave (r, c) into per-qubit pairs: index Σ (2 r_k + c_k) 4^{n-1-k}
    let spread = |x: usize| -> usize {
        let mut out = 0usize;
        for k in 0..n {
            if (x >> k) & 1 == 1 {
                out |= 1 << (2 * k);
            }
        }
        out
    };
    let spread_tab: Vec<usize> = (0..dim).map(spread).collect();
    let mut tensor = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            tensor[(spread_tab[r] << 1) | spread_tab[c]] = dm[(r, c)];
        }
    }
    // A[a][(r,c)] = M_a[c, r]
    let mut map = Vec::with_capacity(m * 4);
    for el in povm.factor().elements() {
        for r in 0..2 {
            for c in 0..2 {
                map.push(el[(c, r)]);
            }
        }
    }
    let probs = linalg::apply_tensor_power(&tensor, n, 4, &map, m);
    debug_assert_eq!(probs.len(), outcomes);
    OutcomeDistribution::new(n, m, probs.iter().map(|p| p.re).collect())
}

/// `Σ_m K_m ρ K_m†` with the channel acting on `qubit`. Pure inputs are
/// promoted to density matrices.
pub fn apply_channel_dense(rho: &DenseState, kraus: &KrausSet, qubit: usize) -> Result<DenseState> {
    let dev = kraus.completeness_defect();
    if dev > KrausSet::COMPLETENESS_TOL {
        return Err(Error::IncompleteKraus(dev));
    }
    if qubit >= rho.n {
        return Err(Error::param(format!("qubit {qubit} out of range for {} qubits", rho.n)));
    }
    let dm = rho.density_matrix();
    let dim = dm.nrows();
    let mut out = CMatrix::zeros(dim, dim);
    for k in kraus.operators() {
        out += conjugate(&dm, k, &[qubit], rho.n);
    }
    Ok(DenseState::mixed_unchecked(out))
}

/// Root fidelity between two dense states.
pub fn fidelity(rho: &DenseState, sigma: &DenseState) -> Result<f64> {
    if rho.n != sigma.n {
        return Err(Error::DimensionMismatch { expected: rho.n, got: sigma.n });
    }
    Ok(match (&rho.kind, &sigma.kind) {
        (StateKind::Pure(_), _) | (_, StateKind::Pure(_)) => exact_overlap(rho, sigma)?.max(0.0).sqrt(),
        _ => linalg::root_fidelity(&rho.density_matrix(), &sigma.density_matrix()),
    })
}

pub fn trace_distance(rho: &DenseState, sigma: &DenseState) -> Result<f64> {
    if rho.n != sigma.n {
        return Err(Error::DimensionMismatch { expected: rho.n, got: sigma.n });
    }
    Ok(linalg::trace_distance(&rho.density_matrix(), &sigma.density_matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{pauli6, ProductPovm};

    fn ket(re: &[f64]) -> DenseState {
        DenseState::from_pure_normalized(DVector::from_iterator(re.len(), re.iter().map(|&x| C64::new(x, 0.0)))).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let zero = ket(&[1.0, 0.0]);
        let one = ket(&[0.0, 1.0]);
        let plus = ket(&[1.0, 1.0]);
        assert!((exact_overlap(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(exact_overlap(&zero, &one).unwrap().abs() < 1e-15);
        assert!((exact_overlap(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!((exact_overlap(&zero.to_mixed(), &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!((exact_overlap(&zero.to_mixed(), &plus.to_mixed()).unwrap() - 0.5).abs() < 1e-15);
        assert!(exact_overlap(&zero, &DenseState::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn random_state_is_normalized_and_deterministic() {
        for n in 1..=5 {
            let spec = RandomStateSpec::entangled(n, 17);
            let a = random_pure_state(&spec).unwrap();
            let b = random_pure_state(&spec).unwrap();
            assert_eq!(a, b);
            assert!((a.trace() - 1.0).abs() < 1e-12);
        }
        let p = random_pure_state(&RandomStateSpec::product(1, 3)).unwrap();
        assert!((p.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_state_rejects_bad_specs() {
        assert!(random_pure_state(&RandomStateSpec::product(13, 0)).is_err());
        let bad = RandomStateSpec { n: 2, family: StateFamily::Entangled, bond_dim: 0, seed: 0 };
        assert!(random_pure_state(&bad).is_err());
        let bad = RandomStateSpec { n: 2, family: StateFamily::Product, bond_dim: 2, seed: 0 };
        assert!(random_pure_state(&bad).is_err());
    }

    #[test]
    fn born_probabilities_examples() {
        let povm1 = ProductPovm::new(pauli6(), 1);
        let mixed = DenseState::maximally_mixed(1).unwrap();
        let p = born_probabilities(&mixed, &povm1).unwrap();
        assert!(p.probs().iter().all(|&x| (x - 1.0 / 6.0).abs() < 1e-15));

        let zero = DenseState::basis(1, 0).unwrap();
        let p = born_probabilities(&zero, &povm1).unwrap();
        let want = [1.0 / 3.0, 0.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in p.probs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn born_probabilities_factorize_for_product_states() {
        let spec = RandomStateSpec::product(2, 5);
        let rho = random_pure_state(&spec).unwrap();
        let povm2 = ProductPovm::new(pauli6(), 2);
        let joint = born_probabilities(&rho, &povm2).unwrap();
        let m0: Vec<f64> = (0..6).map(|a| (0..6).map(|b| joint.probs()[a * 6 + b]).sum()).collect();
        let m1: Vec<f64> = (0..6).map(|b| (0..6).map(|a| joint.probs()[a * 6 + b]).sum()).collect();
        for a in 0..6 {
            for b in 0..6 {
                assert!((joint.probs()[a * 6 + b] - m0[a] * m1[b]).abs() < 1e-12);
            }
        }
        assert!((joint.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn channel_examples() {
        let zero = DenseState::basis(1, 0).unwrap();
        let id = apply_channel_dense(&zero, &KrausSet::depolarizing(0.0).unwrap(), 0).unwrap();
        assert!(linalg::max_abs_diff_c(&id.density_matrix(), &zero.density_matrix()) < 1e-15);
        let full = apply_channel_dense(&zero, &KrausSet::depolarizing(1.0).unwrap(), 0).unwrap();
        assert!(linalg::max_abs_diff_c(&full.density_matrix(), &DenseState::maximally_mixed(1).unwrap().density_matrix()) < 1e-15);
        let weak = apply_channel_dense(&zero, &KrausSet::depolarizing(0.005).unwrap(), 0).unwrap();
        let dm = weak.density_matrix();
        assert!((dm[(0, 0)].re - 0.9975).abs() < 1e-15);
        assert!((dm[(1, 1)].re - 0.0025).abs() < 1e-15);
        assert!(dm[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn full_depolarization_of_one_qubit_in_a_pair() {
        let rho = random_pure_state(&RandomStateSpec::entangled(2, 9)).unwrap();
        let out = apply_channel_dense(&rho, &KrausSet::depolarizing(1.0).unwrap(), 1).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
        let red = out.reduced(&[1]);
        let half = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(linalg::max_abs_diff_c(&red, &half) < 1e-12);
    }

    #[test]
    fn apply_operator_matches_kronecker_embedding() {
        let rho = random_pure_state(&RandomStateSpec::entangled(3, 2)).unwrap();
        let x = linalg::pauli_x();
        let got = rho.apply_unitary(&x, &[1]).unwrap();
        let full = linalg::kron(&linalg::kron(&linalg::identity2(), &x), &linalg::identity2());
        let want = &full * rho.amplitudes().unwrap();
        let diff = (got.amplitudes().unwrap() - want).norm();
        assert!(diff < 1e-12);
    }
}
