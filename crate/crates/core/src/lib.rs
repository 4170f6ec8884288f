//! Quasiprobabilistic estimation of the overlap `Tr(ρσ)` between two
//! multiqubit states.
//!
//! Both states are measured independently with a factorable,
//! informationally complete POVM (Pauli-6 by default). The overlap is then
//! recovered classically by contracting the two empirical outcome
//! distributions with the estimator tensor `τ̂ = τ₁ T τ₂ᵗ`, where `T` is the
//! Gram matrix of the POVM and `τ₁`, `τ₂` are generalized inverses of `T`.
//!
//! The crate also carries everything needed to benchmark that estimator:
//!
//! * [`dense`]: exact small-`n` states, the correctness oracle.
//! * [`povm`] and [`search`]: POVMs, `T` matrices, generalized inverses,
//!   negativity, and searches over POVMs and inverses.
//! * [`estimator`]: sampling, the overlap estimator and Hoeffding planning.
//! * [`tensornet`]: MPS and LPDO states with certified truncation.
//! * [`circuits`]: SWAP-test and Bell-basis circuits on a 1D line with
//!   nearest-neighbour routing, simulated under depolarizing noise.
//! * [`randmeas`]: the randomized-measurement baseline estimator.
//! * [`experiments`]: the experiment runners behind the `qoverlap` CLI.

pub mod channel;
pub mod circuits;
pub mod dense;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod linalg;
pub mod povm;
pub mod randmeas;
pub mod rng;
pub mod search;
pub mod tensornet;

pub use num_complex::Complex64 as C64;

pub use channel::KrausSet;
pub use dense::{DenseState, RandomStateSpec, StateFamily};
pub use error::{Error, Result};
pub use estimator::{EstimateResult, Pairing, SamplePlan, SampleRecord};
pub use povm::{
    EstimatorTensor, GeneralizedInverse, OutcomeDistribution, ProductPovm, QubitPovm, TMatrix,
};
pub use tensornet::{Lpdo, Mps, TnState, TruncationLog};

/// Largest qubit count for which a dense state may be materialized.
pub const DENSE_MAX_QUBITS: usize = 12;
