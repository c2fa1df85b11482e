//! Decides and quantifies whether a more-local Hamiltonian can simulate the
//! dynamics of a k-local target on the same Hilbert space.
//!
//! The crate is organized around a symbolic Pauli-string operator algebra
//! ([`pauli`]) with exact dense Hermitian realization, on top of which sit:
//!
//! - [`spectral`] — dense eigendecomposition, unitary time evolution,
//!   spectral diameter, degeneracy clustering, commutator kernels;
//! - [`shared`] — simultaneous eigenbases of commuting pairs, shared
//!   subspaces of non-commuting pairs, the shared-count upper bound, and
//!   connector-degeneracy tuning;
//! - [`bounds`] — worst-case fidelity error bounds and the BCH
//!   convergence check;
//! - [`dynamics`] — simulation fidelity, worst-case fidelity over states,
//!   and time sweeps;
//! - [`optimize`] — spectral-diameter minimization over a simulator ansatz
//!   and the short-time least-squares simulator search;
//! - [`parent`] — correlation matrices, parent-Hamiltonian detection, and
//!   the block-determinant necessary condition;
//! - [`models`] — the reference spin-chain models used by the scenario
//!   runner and tests.

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod optimize;
pub mod parent;
pub mod pauli;
pub mod shared;
pub mod spectral;

pub use error::{CoreError, Result};
pub use pauli::{InteractionBasis, Letter, PauliOperator, PauliString};

use num_complex::Complex64;

/// Dense complex matrix type used throughout.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector type used throughout.
pub type CVector = nalgebra::DVector<Complex64>;
/// Dense real matrix type (correlation matrices, design matrices).
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector type.
pub type RVector = nalgebra::DVector<f64>;

/// Tolerance bundle threaded through scenario runs.
///
/// `default` matches the per-module defaults; `strict` tightens the
/// clustering and kernel cutoffs by an order of magnitude for
/// cross-checking marginal degeneracies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative eigenvalue-clustering tolerance (scaled by spectral norm).
    pub degeneracy_rel: f64,
    /// Relative commutator-kernel cutoff (scaled by spectral norm).
    pub kernel_rel: f64,
    /// Absolute dedup tolerance for degeneracy-crossing couplings.
    pub crossing_dedup: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        degeneracy_rel: 1e-8,
        kernel_rel: 1e-9,
        crossing_dedup: 1e-9,
    };

    pub const STRICT: Tolerances = Tolerances {
        degeneracy_rel: 1e-9,
        kernel_rel: 1e-10,
        crossing_dedup: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}
