//! Informationally complete POVMs, their Gram (`T`) matrices, generalized
//! inverses and the estimator tensor `τ̂ = τ₁ T τ₂ᵗ`.

use std::path::Path;

use nalgebra::DVector;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::rng::rng_from_seed;
use crate::C64;

pub const POVM_TOL: f64 = 1e-10;
pub const IC_RANK_TOL: f64 = 1e-8;
/// Tolerance of the check `‖TτT − T‖_max < tol`.
pub const GINV_TOL: f64 = 1e-8;
const PINV_RTOL: f64 = 1e-12;

/// A single-qubit POVM: PSD 2×2 operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitPovm {
    name: String,
    elements: Vec<CMatrix>,
}

impl QubitPovm {
    pub fn new(name: impl Into<String>, elements: Vec<CMatrix>) -> Result<Self> {
        if elements.is_empty() || elements.iter().any(|e| e.shape() != (2, 2)) {
            return Err(Error::InvalidPovm("elements must be a non-empty list of 2x2 matrices".into()));
        }
        for (a, e) in elements.iter().enumerate() {
            if linalg::max_abs_diff_c(e, &e.adjoint()) > POVM_TOL {
                return Err(Error::InvalidPovm(format!("element {a} is not Hermitian")));
            }
            let (vals, _) = linalg::hermitian_eigen(e);
            if vals[0] < -POVM_TOL {
                return Err(Error::InvalidPovm(format!("element {a} has eigenvalue {}", vals[0])));
            }
        }
        let sum = elements.iter().fold(CMatrix::zeros(2, 2), |acc, e| acc + e);
        let dev = linalg::max_abs_diff_c(&sum, &linalg::identity2());
        if dev > POVM_TOL {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:.2e}")));
        }
        Ok(QubitPovm { name: name.into(), elements })
    }

    /// Elements `w_a (I + r_a·σ) / 2` from weights and unit Bloch vectors.
    pub fn from_bloch(name: impl Into<String>, weights: &[f64], vectors: &[[f64; 3]]) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), got: vectors.len() });
        }
        let elements = weights
            .iter()
            .zip(vectors)
            .map(|(&w, r)| bloch_operator(w, r))
            .collect();
        QubitPovm::new(name, elements)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Rank of the elements as vectors in the real 4-dimensional space of
    /// Hermitian 2×2 operators.
    pub fn operator_rank(&self) -> usize {
        let paulis = [linalg::identity2(), linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
        let coords = RMatrix::from_fn(self.len(), 4, |a, k| (&self.elements[a] * &paulis[k]).trace().re);
        linalg::rank_r(&coords, IC_RANK_TOL)
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.operator_rank() == 4
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = PovmFile {
            name: self.name.clone(),
            elements: self
                .elements
                .iter()
                .map(|e| ElementFile {
                    re: [[e[(0, 0)].re, e[(0, 1)].re], [e[(1, 0)].re, e[(1, 1)].re]],
                    im: [[e[(0, 0)].im, e[(0, 1)].im], [e[(1, 0)].im, e[(1, 1)].im]],
                })
                .collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: PovmFile = serde_json::from_str(text)?;
        let elements = file
            .elements
            .iter()
            .map(|e| {
                CMatrix::from_fn(2, 2, |i, j| C64::new(e.re[i][j], e.im[i][j]))
            })
            .collect();
        QubitPovm::new(file.name, elements)
    }
}

#[derive(Serialize, Deserialize)]
struct PovmFile {
    name: String,
    elements: Vec<ElementFile>,
}

#[derive(Serialize, Deserialize)]
struct ElementFile {
    re: [[f64; 2]; 2],
    im: [[f64; 2]; 2],
}

pub(crate) fn bloch_operator(w: f64, r: &[f64; 3]) -> CMatrix {
    let half = C64::new(0.5 * w, 0.0);
    (linalg::identity2()
        + linalg::pauli_x() * C64::new(r[0], 0.0)
        + linalg::pauli_y() * C64::new(r[1], 0.0)
        + linalg::pauli_z() * C64::new(r[2], 0.0))
        * half
}

/// The Pauli-6 POVM `{|a⟩⟨a| / 3}` over the eigenvectors of Z, X and Y, in
/// the order `z+, z−, x+, x−, y+, y−`.
pub fn pauli6() -> QubitPovm {
    let axes = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]];
    QubitPovm::from_bloch("pauli6", &[2.0 / 6.0; 6], &axes).expect("Pauli-6 is a valid POVM")
}

/// Projective measurement in the computational basis.
pub fn computational_basis() -> QubitPovm {
    QubitPovm::from_bloch("z-basis", &[1.0, 1.0], &[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).expect("valid POVM")
}

/// The trivial two-outcome POVM `{I/2, I/2}`.
pub fn trivial_povm() -> QubitPovm {
    let half = linalg::identity2() * C64::new(0.5, 0.0);
    QubitPovm::new("trivial", vec![half.clone(), half]).expect("valid POVM")
}

/// The symmetric informationally complete (tetrahedral) 4-outcome POVM.
pub fn tetrahedral_sic() -> QubitPovm {
    let s = 1.0 / 3f64.sqrt();
    let v = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    QubitPovm::from_bloch("sic4", &[0.5; 4], &v).expect("valid POVM")
}

/// `n` tensor copies of a single-qubit POVM. Outcome tuples are indexed
/// `Σ a_k m^{n−1−k}` (qubit 0 most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct ProductPovm {
    factor: QubitPovm,
    n: usize,
}

impl ProductPovm {
    pub fn new(factor: QubitPovm, n: usize) -> Self {
        ProductPovm { factor, n }
    }

    pub fn pauli6(n: usize) -> Self {
        ProductPovm::new(pauli6(), n)
    }

    pub fn factor(&self) -> &QubitPovm {
        &self.factor
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outcomes_per_qubit(&self) -> usize {
        self.factor.len()
    }

    pub fn id(&self) -> &str {
        self.factor.name()
    }

    /// The full operator `M_{a_1} ⊗ … ⊗ M_{a_n}`.
    pub fn element(&self, tuple: &[usize]) -> CMatrix {
        tuple
            .iter()
            .fold(CMatrix::identity(1, 1), |acc, &a| linalg::kron(&acc, &self.factor.elements[a]))
    }
}

/// A (quasi)probability vector over all outcome tuples of a product POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    n: usize,
    m: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub const ENTRY_TOL: f64 = 1e-12;
    pub const SUM_TOL: f64 = 1e-10;

    pub fn new(n: usize, m: usize, probs: Vec<f64>) -> Result<Self> {
        let expected = m.pow(n as u32);
        if probs.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: probs.len() });
        }
        if let Some(p) = probs.iter().find(|&&p| p < -Self::ENTRY_TOL || !p.is_finite()) {
            return Err(Error::param(format!("distribution has invalid entry {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::param(format!("distribution sums to {sum}")));
        }
        Ok(OutcomeDistribution { n, m, probs })
    }

    pub fn uniform(n: usize, m: usize) -> Self {
        let len = m.pow(n as u32);
        OutcomeDistribution { n, m, probs: vec![1.0 / len as f64; len] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outcomes_per_qubit(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Gram matrix `[T]_{ab} = Tr(M_a M_b)` of a single-qubit POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct TMatrix(RMatrix);

impl TMatrix {
    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn from_matrix(m: RMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        Ok(TMatrix(m))
    }

    /// `‖TτT − T‖_max`.
    pub fn ginv_residual(&self, tau: &RMatrix) -> Result<f64> {
        if tau.shape() != self.0.shape() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: tau.nrows() });
        }
        Ok(linalg::max_abs_diff_r(&(&self.0 * tau * &self.0), &self.0))
    }
}

pub fn compute_t_matrix(povm: &QubitPovm) -> TMatrix {
    let m = povm.len();
    TMatrix(RMatrix::from_fn(m, m, |a, b| (&povm.elements[a] * &povm.elements[b]).trace().re))
}

/// A matrix `τ` with `T τ T = T`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedInverse(RMatrix);

impl GeneralizedInverse {
    /// Accepts `tau` only if it satisfies `T τ T = T` for `t`.
    pub fn new(t: &TMatrix, tau: RMatrix) -> Result<Self> {
        let res = t.ginv_residual(&tau)?;
        if res >= GINV_TOL {
            return Err(Error::NotGeneralizedInverse(res));
        }
        Ok(GeneralizedInverse(tau))
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }
}

/// Moore–Penrose pseudoinverse of `T`.
pub fn pseudoinverse(t: &TMatrix) -> GeneralizedInverse {
    GeneralizedInverse(linalg::pinv_symmetric(&t.0, PINV_RTOL))
}

pub fn is_generalized_inverse(t: &TMatrix, tau: &RMatrix) -> Result<bool> {
    Ok(t.ginv_residual(tau)? < GINV_TOL)
}

/// `τ = T⁺ + W − T⁺ T W T T⁺`, the general solution of `T τ T = T`.
pub fn generalized_inverse_from(t: &TMatrix, t_pinv: &RMatrix, w: &RMatrix) -> RMatrix {
    let tm = &t.0;
    t_pinv + w - t_pinv * tm * w * tm * t_pinv
}

/// A generalized inverse drawn from the solution family with a standard
/// Gaussian `W`.
pub fn random_generalized_inverse(t: &TMatrix, seed: u64) -> Result<GeneralizedInverse> {
    let mut rng = rng_from_seed(seed);
    let m = t.dim();
    let w = RMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let pinv = pseudoinverse(t);
    GeneralizedInverse::new(t, generalized_inverse_from(t, pinv.matrix(), &w))
}

/// Range `max − min` of a matrix's entries.
pub fn negativity(m: &RMatrix) -> f64 {
    let (lo, hi) = m.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// The single-qubit estimator tensor `τ̂ = τ₁ T τ₂ᵗ` and its negativity.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorTensor {
    entries: RMatrix,
    negativity: f64,
}

impl EstimatorTensor {
    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }

    pub fn negativity(&self) -> f64 {
        self.negativity
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Row-major entries, convenient for tight sampling loops.
    pub fn row_major(&self) -> Vec<f64> {
        linalg::row_major(&self.entries)
    }

    /// The tensor associated with a raw matrix, bypassing the
    /// generalized-inverse checks. Used for non-POVM kernels.
    pub fn from_raw(entries: RMatrix) -> Self {
        let negativity = negativity(&entries);
        EstimatorTensor { entries, negativity }
    }
}

pub fn estimator_tensor(tau1: &GeneralizedInverse, tau2: &GeneralizedInverse, t: &TMatrix) -> Result<EstimatorTensor> {
    for tau in [tau1, tau2] {
        let res = t.ginv_residual(&tau.0)?;
        if res >= GINV_TOL {
            return Err(Error::NotGeneralizedInverse(res));
        }
    }
    Ok(EstimatorTensor::from_raw(&tau1.0 * &t.0 * tau2.0.transpose()))
}

/// The standard Pauli-6 estimator tensor `T⁺ T T⁺ = T⁺`.
pub fn pauli6_estimator() -> EstimatorTensor {
    let t = compute_t_matrix(&pauli6());
    let p = pseudoinverse(&t);
    estimator_tensor(&p, &p, &t).expect("pseudoinverse is a generalized inverse")
}

/// `ρ = Σ_{a,a'} P(a) τ_{aa'} M_{a'}` with `τ^{⊗n}` built from a raw matrix,
/// which need not be a generalized inverse.
pub fn reconstruct_with_matrix(p: &OutcomeDistribution, tau: &RMatrix, povm: &ProductPovm) -> Result<CMatrix> {
    let m = povm.outcomes_per_qubit();
    let n = povm.n();
    if p.n != n || p.m != m {
        return Err(Error::DimensionMismatch { expected: m.pow(n as u32), got: p.probs.len() });
    }
    if tau.shape() != (m, m) {
        return Err(Error::DimensionMismatch { expected: m, got: tau.nrows() });
    }
    if n > crate::DENSE_MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: crate::DENSE_MAX_QUBITS });
    }
    // coefficients c = (τᵗ)^{⊗n} P, then operator tensor via a' ↦ M_{a'}
    let tau_t = linalg::row_major(&tau.transpose());
    let coeff = linalg::apply_tensor_power(&p.probs, n, m, &tau_t, m);
    let coeff: Vec<C64> = coeff.into_iter().map(|x| C64::new(x, 0.0)).collect();
    let mut map = vec![C64::new(0.0, 0.0); 4 * m];
    for (a, el) in povm.factor().elements().iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                map[(2 * r + c) * m + a] = el[(r, c)];
            }
        }
    }
    let op = linalg::apply_tensor_power(&coeff, n, m, &map, 4);
    let dim = 1usize << n;
    let mut rho = CMatrix::zeros(dim, dim);
    for (idx, val) in op.into_iter().enumerate() {
        let (mut r, mut c) = (0usize, 0usize);
        for k in 0..n {
            let pair = (idx >> (2 * (n - 1 - k))) & 3;
            r = (r << 1) | (pair >> 1);
            c = (c << 1) | (pair & 1);
        }
        rho[(r, c)] = val;
    }
    Ok(rho)
}

pub fn reconstruct_state(p: &OutcomeDistribution, tau: &GeneralizedInverse, povm: &ProductPovm) -> Result<DenseState> {
    Ok(DenseState::mixed_unchecked(reconstruct_with_matrix(p, &tau.0, povm)?))
}

/// The shadow-derived matrix `τ̃` in Pauli-6 ordering (`z+, z−, x+, x−, y+, y−`),
/// before the 1/3 rescaling.
pub fn shadow_tau() -> RMatrix {
    let block = [[2.0, -1.0], [-1.0, 2.0]];
    RMatrix::from_fn(6, 6, |i, j| if i / 2 == j / 2 { block[i % 2][j % 2] } else { 0.0 })
}

/// Outcome of comparing the classical-shadow inverse with `T⁺` for Pauli-6.
#[derive(Clone, Debug)]
pub struct ShadowReport {
    /// `‖T (3τ̃) T − T‖_max`.
    pub scaled_ginv_residual: f64,
    pub scaled_is_generalized_inverse: bool,
    /// `‖(3τ̃) T − T⁺ T‖_max`.
    pub scaled_tau_t_deviation: f64,
    /// `‖τ̃ T − T⁺ T‖_max` for the unscaled matrix (not expected to vanish).
    pub unscaled_tau_t_deviation: f64,
    /// `‖τ̂(3τ̃, 3τ̃) − τ̂(T⁺, T⁺)‖_max`.
    pub estimator_deviation: f64,
    /// `‖τ̂(3τ̃, T⁺) − τ̂(T⁺, T⁺)‖_max`.
    pub mixed_estimator_deviation: f64,
}

pub fn verify_shadow_equivalence() -> ShadowReport {
    let t = compute_t_matrix(&pauli6());
    let pinv = pseudoinverse(&t);
    let raw = shadow_tau();
    let scaled = &raw * 3.0;
    let pt = pinv.matrix() * t.matrix();
    let scaled_ginv_residual = t.ginv_residual(&scaled).expect("shapes match");
    let reference = pinv.matrix() * t.matrix() * pinv.matrix().transpose();
    let est_scaled = &scaled * t.matrix() * scaled.transpose();
    let est_mixed = &scaled * t.matrix() * pinv.matrix().transpose();
    ShadowReport {
        scaled_ginv_residual,
        scaled_is_generalized_inverse: scaled_ginv_residual < GINV_TOL,
        scaled_tau_t_deviation: linalg::max_abs_diff_r(&(&scaled * t.matrix()), &pt),
        unscaled_tau_t_deviation: linalg::max_abs_diff_r(&(&raw * t.matrix()), &pt),
        estimator_deviation: linalg::max_abs_diff_r(&est_scaled, &reference),
        mixed_estimator_deviation: linalg::max_abs_diff_r(&est_mixed, &reference),
    }
}

/// Qubit state `(I + r·σ)/2` as a dense state, convenient in tests.
pub fn bloch_state(r: [f64; 3]) -> Result<DenseState> {
    DenseState::from_density(bloch_operator(1.0, &r))
}

/// Dense outcome distribution of a state given as a vector of amplitudes;
/// shorthand used by tests and examples.
pub fn single_qubit_probs(povm: &QubitPovm, psi: &DVector<C64>) -> Vec<f64> {
    povm.elements().iter().map(|e| psi.dotc(&(e * psi)).re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{born_probabilities, random_pure_state, RandomStateSpec};

    #[test]
    fn pauli6_basic_properties() {
        let p = pauli6();
        let sum = p.elements().iter().fold(CMatrix::zeros(2, 2), |a, e| a + e);
        assert!(linalg::max_abs_diff_c(&sum, &linalg::identity2()) < 1e-14);
        for e in p.elements() {
            assert!((e.trace().re - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(p.operator_rank(), 4);
    }

    #[test]
    fn t_matrix_examples() {
        let t = compute_t_matrix(&pauli6());
        for a in 0..6 {
            for b in 0..6 {
                let want = if a == b {
                    1.0 / 9.0
                } else if a / 2 == b / 2 {
                    0.0
                } else {
                    1.0 / 18.0
                };
                assert!((t.matrix()[(a, b)] - want).abs() < 1e-15, "T[{a},{b}]");
            }
        }
        let tz = compute_t_matrix(&computational_basis());
        assert!(linalg::max_abs_diff_r(tz.matrix(), &RMatrix::identity(2, 2)) < 1e-15);
        let tt = compute_t_matrix(&trivial_povm());
        assert!(linalg::max_abs_diff_r(tt.matrix(), &RMatrix::from_element(2, 2, 0.5)) < 1e-15);
    }

    #[test]
    fn pseudoinverse_examples() {
        let t = compute_t_matrix(&pauli6());
        let p = pseudoinverse(&t);
        // spectral cross-check T⁺ = 9 (J/18 + I − S/2), S = same-basis indicator
        let spectral = RMatrix::from_fn(6, 6, |a, b| {
            let j = 1.0 / 18.0;
            let i = if a == b { 1.0 } else { 0.0 };
            let s = if a / 2 == b / 2 { 1.0 } else { 0.0 };
            9.0 * (j + i - s / 2.0)
        });
        assert!(linalg::max_abs_diff_r(p.matrix(), &spectral) < 1e-9);
        let ident = TMatrix::from_matrix(RMatrix::identity(3, 3)).unwrap();
        assert!(linalg::max_abs_diff_r(pseudoinverse(&ident).matrix(), &RMatrix::identity(3, 3)) < 1e-15);
        let tt = compute_t_matrix(&trivial_povm());
        assert!(linalg::max_abs_diff_r(pseudoinverse(&tt).matrix(), &RMatrix::from_element(2, 2, 0.5)) < 1e-14);
    }

    #[test]
    fn generalized_inverse_checks() {
        let t = compute_t_matrix(&pauli6());
        let p = pseudoinverse(&t);
        assert!(is_generalized_inverse(&t, p.matrix()).unwrap());
        assert!(is_generalized_inverse(&t, &(shadow_tau() * 3.0)).unwrap());
        assert!(!is_generalized_inverse(&t, &RMatrix::zeros(6, 6)).unwrap());
        assert!(is_generalized_inverse(&t, &RMatrix::zeros(5, 5)).is_err());
        let w0 = generalized_inverse_from(&t, p.matrix(), &RMatrix::zeros(6, 6));
        assert!(linalg::max_abs_diff_r(&w0, p.matrix()) < 1e-15);
        for seed in 0..10 {
            let g = random_generalized_inverse(&t, seed).unwrap();
            assert!(t.ginv_residual(g.matrix()).unwrap() < GINV_TOL);
        }
    }

    #[test]
    fn estimator_tensor_examples() {
        let t = compute_t_matrix(&pauli6());
        let p = pseudoinverse(&t);
        let e = estimator_tensor(&p, &p, &t).unwrap();
        assert!(linalg::max_abs_diff_r(e.entries(), p.matrix()) < 1e-12);
        assert!((e.negativity() - 9.0).abs() < 1e-9);
        let shadow = GeneralizedInverse::new(&t, shadow_tau() * 3.0).unwrap();
        let mixed = estimator_tensor(&shadow, &p, &t).unwrap();
        assert!(linalg::max_abs_diff_r(mixed.entries(), e.entries()) < 1e-10);
        assert!(GeneralizedInverse::new(&t, RMatrix::zeros(6, 6)).is_err());
    }

    #[test]
    fn estimator_tensor_transpose_symmetry() {
        let t = compute_t_matrix(&pauli6());
        let a = random_generalized_inverse(&t, 1).unwrap();
        let b = random_generalized_inverse(&t, 2).unwrap();
        let ab = estimator_tensor(&a, &b, &t).unwrap();
        let ba = estimator_tensor(&b, &a, &t).unwrap();
        assert!(linalg::max_abs_diff_r(&ab.entries().transpose(), ba.entries()) < 1e-12);
    }

    #[test]
    fn shadow_equivalence_report() {
        let r = verify_shadow_equivalence();
        assert!(r.scaled_is_generalized_inverse);
        assert!(r.scaled_tau_t_deviation < 1e-12);
        assert!(r.estimator_deviation < 1e-10);
        assert!(r.mixed_estimator_deviation < 1e-10);
        // the unscaled matrix differs from T⁺T: τ̃T = J/18 + P/3 while T⁺T = J/6 + P
        assert!(r.unscaled_tau_t_deviation > 0.1);
    }

    #[test]
    fn reconstruction_examples() {
        let povm = ProductPovm::pauli6(1);
        let t = compute_t_matrix(povm.factor());
        let p = pseudoinverse(&t);
        let zero = DenseState::basis(1, 0).unwrap();
        let dist = born_probabilities(&zero, &povm).unwrap();
        let rec = reconstruct_state(&dist, &p, &povm).unwrap();
        assert!(linalg::max_abs_diff_c(&rec.density_matrix(), &zero.density_matrix()) < 1e-10);

        let uni = OutcomeDistribution::uniform(2, 6);
        let rec = reconstruct_state(&uni, &p, &ProductPovm::pauli6(2)).unwrap();
        let want = CMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        assert!(linalg::max_abs_diff_c(&rec.density_matrix(), &want) < 1e-12);

        let rho = random_pure_state(&RandomStateSpec::entangled(2, 4)).unwrap();
        let povm2 = ProductPovm::pauli6(2);
        let g = random_generalized_inverse(&t, 99).unwrap();
        let dist = born_probabilities(&rho, &povm2).unwrap();
        let rec = reconstruct_state(&dist, &g, &povm2).unwrap();
        assert!(linalg::max_abs_diff_c(&rec.density_matrix(), &rho.density_matrix()) < 1e-9);
    }

    #[test]
    fn tetrahedral_sic_pseudoinverse() {
        // T = (J + 2I)/12, so T⁻¹ = 6I − J: entries 5 and −1
        let sic = tetrahedral_sic();
        assert!(sic.is_informationally_complete());
        let t = compute_t_matrix(&sic);
        let p = pseudoinverse(&t);
        let want = RMatrix::from_fn(4, 4, |a, b| if a == b { 5.0 } else { -1.0 });
        assert!(linalg::max_abs_diff_r(p.matrix(), &want) < 1e-9);
        let tau_hat = estimator_tensor(&p, &p, &t).unwrap();
        assert!((tau_hat.negativity() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn povm_validation_and_json_round_trip() {
        let half = linalg::identity2() * C64::new(0.5, 0.0);
        assert!(QubitPovm::new("bad", vec![half.clone()]).is_err());
        let neg = linalg::pauli_z();
        assert!(QubitPovm::new("bad", vec![neg, linalg::identity2() - linalg::pauli_z()]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p6.json");
        pauli6().save_json(&path).unwrap();
        let back = QubitPovm::load_json(&path).unwrap();
        assert_eq!(back.name(), "pauli6");
        for (a, b) in back.elements().iter().zip(pauli6().elements()) {
            assert!(linalg::max_abs_diff_c(a, b) < 1e-15);
        }
        assert!(QubitPovm::from_json_str("{\"name\":\"x\",\"elements\":[]}").is_err());
    }

    #[test]
    fn coplanar_povm_is_not_ic() {
        let v = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]];
        let p = QubitPovm::from_bloch("xy", &[0.5; 4], &v).unwrap();
        assert_eq!(p.operator_rank(), 3);
        assert!(!p.is_informationally_complete());
    }
}
