//! Exact numerical laboratory for coarse-grained entropy growth and
//! decoherence in closed finite quantum systems.
//!
//! - [`qstate`]: validated state, projector-family, and channel primitives.
//! - [`entropy`]: von Neumann / relative / coarse-grained entropy functionals.
//! - [`histories`]: decoherence functionals over timed event sequences.
//! - [`coleman_hepp`]: spin-chain measurement model with structured and dense
//!   engines.
//! - [`avalanche`]: reversible flip-avalanche register dynamics and orbit
//!   analysis.
//! - [`anosov`]: dilation-flow wave-packet model with closed-form evolution.
//! - [`suites`]: seeded randomized invariant suites shared by the CLI and the
//!   acceptance tests.
//!
//! All entropies are natural-log (nats) and Boltzmann's constant is taken as 1.

pub mod anosov;
pub mod avalanche;
pub mod coleman_hepp;
pub mod entropy;
pub mod histories;
pub mod par;
pub mod qstate;
pub mod random;
pub mod suites;

/// Numerical contract tolerances, pinned once and shared by every module.
pub mod tol {
    /// Max-entry deviation allowed from Hermitian symmetry.
    pub const HERMITIAN: f64 = 1e-12;
    /// Most negative eigenvalue accepted for a positive-semidefinite matrix.
    pub const EIG_FLOOR: f64 = -1e-10;
    /// Deviation allowed from unit trace.
    pub const TRACE: f64 = 1e-12;
    /// Deviation allowed from unit vector norm.
    pub const NORM: f64 = 1e-12;
    /// Max-entry deviation allowed for projector idempotence/orthogonality
    /// and for completeness of a projector family.
    pub const PROJECTOR: f64 = 1e-12;
    /// Max-entry deviation allowed from `U^dag U = I`.
    pub const UNITARY: f64 = 1e-12;
    /// Max-entry deviation allowed from `sum_k K_k^dag K_k = I`.
    pub const KRAUS: f64 = 1e-12;
    /// Cell weights at or below this value count as zero weight.
    pub const WEIGHT_FLOOR: f64 = 1e-14;
    /// Eigenvalues at or below this value are clipped to zero before logs.
    pub const ENTROPY_CLIP: f64 = 1e-12;
    /// Eigenvalues at or below this value count as outside the support when
    /// comparing supports for the relative entropy.
    pub const SUPPORT: f64 = 1e-12;
    /// Default commutator tolerance for calling a state decoherent.
    pub const DECOHERENT: f64 = 1e-10;
}
