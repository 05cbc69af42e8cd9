//! Entropy functionals: von Neumann, relative, and the coarse-grained
//! entropy of a pinched state, plus the monotonicity gap report.
//!
//! - Entropies are in nats; eigenvalues at or below the clip threshold are
//!   dropped before logs, so `0 log 0 = 0`.
//! - The relative entropy evaluates both states in their own eigenbases and
//!   returns `f64::INFINITY` when the first support leaks outside the second.

use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{
    conditional_state, pinch, trace_product, CMatrix, DensityMatrix, ProjectorFamily, StateError,
    UnitaryMap,
};
use crate::tol;

/// Errors raised by entropy-level operations.
#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("initial state is not decoherent for the given cells: max commutator {max_commutator:.3e}")]
    NotDecoherentInitialState { max_commutator: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Result alias for entropy-level operations.
pub type Result<T, E = EntropyError> = std::result::Result<T, E>;

/// Entropy bookkeeping for one evolved state against one cell family.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    /// Fine-grained entropy of the initial state (invariant under the
    /// evolution).
    pub s_vn: f64,
    /// Coarse-grained entropy of the evolved state.
    pub s_qb: f64,
    /// Coarse-grained entropy change from the initial to the evolved state.
    pub gap: f64,
    /// Whether the initial state commuted with every cell.
    pub decoherent_initial: bool,
}

/// Shannon entropy `-sum w ln w` of a weight list, ignoring non-positive entries.
pub fn shannon(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights
        .into_iter()
        .filter(|&w| w > 0.0)
        .fold(0.0, |acc, w| acc - w * w.ln())
}

/// Von Neumann entropy `-Tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon(rho.eigenvalues_clipped())
}

/// Relative entropy `Tr(rho1 ln rho1) - Tr(rho1 ln rho2)`.
///
/// Returns `f64::INFINITY` when the support of `rho1` is not contained in
/// the support of `rho2` (eigenvalue threshold [`tol::SUPPORT`]).
pub fn relative_entropy(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    assert_eq!(rho1.dim(), rho2.dim(), "relative entropy needs equal dimensions");
    let e1 = rho1.matrix().clone().symmetric_eigen();
    let e2 = rho2.matrix().clone().symmetric_eigen();
    let dim = rho1.dim();

    // overlap weights |<v_i, w_j>|^2 between the two eigenbases
    let mut kernel_mass = 0.0;
    let mut cross = 0.0;
    let mut own = 0.0;
    for i in 0..dim {
        let r = e1.eigenvalues[i].max(0.0);
        if r <= tol::SUPPORT {
            continue;
        }
        own += r * r.ln();
        for j in 0..dim {
            let s = e2.eigenvalues[j].max(0.0);
            let ov = e1.eigenvectors.column(i).dotc(&e2.eigenvectors.column(j)).norm_sqr();
            if s <= tol::SUPPORT {
                kernel_mass += r * ov;
            } else {
                cross += r * ov * s.ln();
            }
        }
    }
    if kernel_mass > 1e-10 {
        return f64::INFINITY;
    }
    own - cross
}

/// Coarse-grained entropy: von Neumann entropy of the pinched state.
pub fn quantum_boltzmann_entropy(rho: &DensityMatrix, cells: &ProjectorFamily) -> Result<f64> {
    Ok(von_neumann_entropy(&pinch(rho, cells)?))
}

/// Weighted average `sum_a w_a S(rho_a)` of the conditional states over
/// cells with weight above the zero-weight floor.
pub fn collapse_average_entropy(rho: &DensityMatrix, cells: &ProjectorFamily) -> Result<f64> {
    let mut acc = 0.0;
    for alpha in 0..cells.len() {
        match conditional_state(rho, cells, alpha) {
            Ok((cond, w)) => acc += w * von_neumann_entropy(&cond),
            Err(StateError::ZeroWeight { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(acc)
}

/// Coarse-grained entropy change under one unitary step, starting from a
/// state that must already be decoherent for `cells`.
pub fn second_law_gap(
    rho0: &DensityMatrix,
    u: &UnitaryMap,
    cells: &ProjectorFamily,
) -> Result<EntropyReport> {
    let max_commutator = cells
        .projectors()
        .iter()
        .map(|p| crate::qstate::commutator_max_norm(p, rho0.matrix()))
        .fold(0.0, f64::max);
    if max_commutator > tol::DECOHERENT {
        return Err(EntropyError::NotDecoherentInitialState { max_commutator });
    }
    let s_qb_initial = quantum_boltzmann_entropy(rho0, cells)?;
    let evolved = u.evolve_density(rho0)?;
    let s_qb = quantum_boltzmann_entropy(&evolved, cells)?;
    Ok(EntropyReport {
        s_vn: von_neumann_entropy(rho0),
        s_qb,
        gap: s_qb - s_qb_initial,
        decoherent_initial: true,
    })
}

/// Max-entry norm of the symmetrized cross-cell part
/// `sum_{a<b} (P_a rho P_b + P_b rho P_a)`; zero exactly when the
/// coarse-grained entropy step closes to equality.
pub fn equality_witness(rho: &DensityMatrix, cells: &ProjectorFamily) -> Result<f64> {
    if rho.dim() != cells.dim() {
        return Err(StateError::DimensionMismatch { expected: cells.dim(), found: rho.dim() }.into());
    }
    let dim = rho.dim();
    // For a diagonal family the summed cross blocks are exactly the entries
    // whose row and column indices fall in different cells, so the witness is
    // the largest such entry and the matrix products can be skipped.
    if let Some(cell_of) = cells.diagonal_cells() {
        let mut worst = 0.0f64;
        for j in 0..dim {
            for i in 0..dim {
                if cell_of[i] != cell_of[j] {
                    worst = worst.max(rho.matrix()[(i, j)].norm());
                }
            }
        }
        return Ok(worst);
    }
    let mut acc = CMatrix::zeros(dim, dim);
    for a in 0..cells.len() {
        for b in (a + 1)..cells.len() {
            let pa = cells.projector(a);
            let pb = cells.projector(b);
            let cross = pa * rho.matrix() * pb;
            acc += &cross + cross.adjoint();
        }
    }
    Ok(crate::qstate::max_entry_norm(&acc))
}

/// Expectation `Tr(rho O)`, real part (diagnostic helper for observables).
pub fn expectation(rho: &DensityMatrix, observable: &CMatrix) -> Complex64 {
    trace_product(rho.matrix(), observable)
}
