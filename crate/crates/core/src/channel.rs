//! Kraus representations of single-qubit channels.

use crate::error::{Error, Result};
use crate::linalg::{identity2, max_abs_diff_c, pauli_x, pauli_y, pauli_z, CMatrix};
use crate::C64;

/// A single-qubit channel `ρ ↦ Σ_m K_m ρ K_m†`.
#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<CMatrix>,
}

impl KrausSet {
    pub const COMPLETENESS_TOL: f64 = 1e-12;

    /// Builds a Kraus set, rejecting operators that are not 2×2 or that
    /// violate `Σ K†K = I`.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        if operators.is_empty() || operators.iter().any(|k| k.shape() != (2, 2)) {
            return Err(Error::param("Kraus operators must be a non-empty list of 2x2 matrices"));
        }
        let set = KrausSet { operators };
        let dev = set.completeness_defect();
        if dev > Self::COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(set)
    }

    /// Depolarizing channel with factor `lambda`:
    /// `K₁ = √((4−3λ)/4) I`, `K₂,₃,₄ = √(λ/4) σˣ, σʸ, σᶻ`.
    pub fn depolarizing(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::param(format!("depolarizing factor {lambda} outside [0, 1]")));
        }
        let a = C64::new(((4.0 - 3.0 * lambda) / 4.0).sqrt(), 0.0);
        let b = C64::new((lambda / 4.0).sqrt(), 0.0);
        KrausSet::new(vec![identity2() * a, pauli_x() * b, pauli_y() * b, pauli_z() * b])
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, k| acc + k.adjoint() * k);
        max_abs_diff_c(&sum, &identity2())
    }

    /// Applies the channel to a 2×2 density matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, k| acc + k * rho * k.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depolarizing_is_complete_for_all_factors() {
        for i in 0..=20 {
            let ks = KrausSet::depolarizing(i as f64 / 20.0).unwrap();
            assert!(ks.completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_shrinks_bloch_vector() {
        let rho0 = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        let out = KrausSet::depolarizing(0.005).unwrap().apply(&rho0);
        assert!((out[(0, 0)].re - 0.9975).abs() < 1e-15);
        assert!((out[(1, 1)].re - 0.0025).abs() < 1e-15);
        let full = KrausSet::depolarizing(1.0).unwrap().apply(&rho0);
        assert!(max_abs_diff_c(&full, &(identity2() * C64::new(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn rejects_incomplete_sets() {
        let half = identity2() * C64::new(0.5, 0.0);
        assert!(matches!(KrausSet::new(vec![half]), Err(Error::IncompleteKraus(_))));
        assert!(KrausSet::depolarizing(1.5).is_err());
    }
}
