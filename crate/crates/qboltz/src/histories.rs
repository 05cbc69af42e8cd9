//! Decoherence functionals over timed event sequences.
//!
//! - A [`HistorySpec`] is an ordered list of events, each pairing the unitary
//!   that evolves the state up to the event with the cell family measured at
//!   the event.
//! - The decoherence matrix `D(a', a) = Tr[C_{a'} rho C_a^dag]` uses chain
//!   operators `C_a = P_{a_n} U_n ... P_{a_1} U_1`.
//! - Multi-labels are flattened row-major with the first event as the
//!   slowest index.

use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{
    trace_product, CMatrix, DensityMatrix, ProjectorFamily, PureState, StateError, UnitaryMap,
};
use crate::tol;

/// Errors raised when assembling or validating a decoherence matrix.
#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("history spec has no events")]
    NoEvents,
    #[error("event {index} dimension {found} does not match state dimension {expected}")]
    EventDimension { index: usize, expected: usize, found: usize },
    #[error("decoherence matrix is not Hermitian: max deviation {dev:.3e}")]
    NotHermitian { dev: f64 },
    #[error("decoherence matrix has negative eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },
    #[error("diagonal entry {index} is negative: {value:.3e}")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("diagonal sums to {sum} instead of one")]
    DiagonalSum { sum: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Result alias for history-level operations.
pub type Result<T, E = HistoryError> = std::result::Result<T, E>;

/// Ordered measurement schedule: `(unitary to the event, cells at the event)`.
#[derive(Debug, Clone)]
pub struct HistorySpec {
    events: Vec<(UnitaryMap, ProjectorFamily)>,
}

impl HistorySpec {
    /// Validates that every unitary and family share one dimension.
    pub fn new(events: Vec<(UnitaryMap, ProjectorFamily)>) -> Result<Self> {
        if events.is_empty() {
            return Err(HistoryError::NoEvents);
        }
        let dim = events[0].0.dim();
        for (k, (u, fam)) in events.iter().enumerate() {
            if u.dim() != dim {
                return Err(HistoryError::EventDimension { index: k, expected: dim, found: u.dim() });
            }
            if fam.dim() != dim {
                return Err(HistoryError::EventDimension { index: k, expected: dim, found: fam.dim() });
            }
        }
        Ok(Self { events })
    }

    pub fn dim(&self) -> usize {
        self.events[0].0.dim()
    }

    pub fn events(&self) -> &[(UnitaryMap, ProjectorFamily)] {
        &self.events
    }

    /// Cells per event, in event order.
    pub fn shape(&self) -> Vec<usize> {
        self.events.iter().map(|(_, fam)| fam.len()).collect()
    }
}

/// Validated Gram matrix of history branches.
#[derive(Debug, Clone)]
pub struct DecoherenceMatrix {
    mat: CMatrix,
    shape: Vec<usize>,
}

impl DecoherenceMatrix {
    fn validate(mat: CMatrix, shape: Vec<usize>) -> Result<Self> {
        let dev = crate::qstate::hermiticity_deviation(&mat);
        if dev > tol::HERMITIAN {
            return Err(HistoryError::NotHermitian { dev });
        }
        let min_eig = mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < tol::EIG_FLOOR {
            return Err(HistoryError::NotPositive { min_eig });
        }
        let mut sum = 0.0;
        for k in 0..mat.nrows() {
            let d = mat[(k, k)].re;
            if d < -1e-12 {
                return Err(HistoryError::NegativeDiagonal { index: k, value: d });
            }
            sum += d;
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(HistoryError::DiagonalSum { sum });
        }
        Ok(Self { mat, shape })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Cells per event.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Number of histories (product of cells per event).
    pub fn len(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.mat.nrows() == 0
    }

    /// Multi-label for a flat index; the first event is the slowest index.
    pub fn label_of_index(&self, mut flat: usize) -> Vec<usize> {
        let mut label = vec![0usize; self.shape.len()];
        for (pos, &cells) in self.shape.iter().enumerate().rev() {
            label[pos] = flat % cells;
            flat /= cells;
        }
        label
    }

    /// Flat index for a multi-label; inverse of [`Self::label_of_index`].
    pub fn index_of_label(&self, label: &[usize]) -> usize {
        assert_eq!(label.len(), self.shape.len(), "label length must match event count");
        let mut flat = 0usize;
        for (pos, &cells) in self.shape.iter().enumerate() {
            debug_assert!(label[pos] < cells);
            flat = flat * cells + label[pos];
        }
        flat
    }

    /// Largest off-diagonal magnitude.
    pub fn max_offdiagonal(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.mat.nrows() {
            for j in 0..self.mat.ncols() {
                if i != j {
                    dev = dev.max(self.mat[(i, j)].norm());
                }
            }
        }
        dev
    }
}

/// Builds the decoherence matrix of `spec` from the initial state `rho0`.
pub fn decoherence_functional(rho0: &DensityMatrix, spec: &HistorySpec) -> Result<DecoherenceMatrix> {
    if rho0.dim() != spec.dim() {
        return Err(HistoryError::EventDimension { index: 0, expected: rho0.dim(), found: spec.dim() });
    }
    let shape = spec.shape();
    let total: usize = shape.iter().product();
    let dim = spec.dim();

    // chain operators C = P_{a_n} U_n ... P_{a_1} U_1, built by extending
    // shared prefixes one event at a time
    let mut chains: Vec<CMatrix> = vec![CMatrix::identity(dim, dim)];
    for (u, fam) in spec.events() {
        let mut next = Vec::with_capacity(chains.len() * fam.len());
        for prefix in &chains {
            let evolved = u.matrix() * prefix;
            for p in fam.projectors() {
                next.push(p * &evolved);
            }
        }
        chains = next;
    }
    debug_assert_eq!(chains.len(), total);

    let mut mat = CMatrix::zeros(total, total);
    let entries = crate::par::map_indexed(total * total, |flat| {
        let (row, col) = (flat / total, flat % total);
        let c_row_rho = &chains[row] * rho0.matrix();
        trace_product(&c_row_rho, &chains[col].adjoint())
    });
    for (flat, val) in entries.into_iter().enumerate() {
        mat[(flat / total, flat % total)] = val;
    }
    DecoherenceMatrix::validate(mat, shape)
}

/// Diagonal of the decoherence matrix with negatives clipped to zero.
pub fn history_probabilities(d: &DecoherenceMatrix) -> Vec<f64> {
    (0..d.len()).map(|k| d.matrix()[(k, k)].re.max(0.0)).collect()
}

/// True when every off-diagonal magnitude is at most `tolerance`.
pub fn decoheres(d: &DecoherenceMatrix, tolerance: f64) -> bool {
    d.max_offdiagonal() <= tolerance
}

/// Number of basis amplitudes with `|c_j|^2` above `threshold`; support-size
/// diagnostic for an evolving pure state.
pub fn support_cardinality(psi: &PureState, threshold: f64) -> usize {
    psi.amplitudes().iter().filter(|a| a.norm_sqr() > threshold).count()
}

/// Diagonal weights recomputed by iterated evolve-and-select, without chain
/// operators: the selective-evolution route to the same branch weights.
pub fn branch_weights_by_selection(rho0: &DensityMatrix, spec: &HistorySpec) -> Result<Vec<f64>> {
    let shape = spec.shape();
    let total: usize = shape.iter().product();
    let mut weights = Vec::with_capacity(total);
    for flat in 0..total {
        // decode flat index (first event slowest)
        let mut label = vec![0usize; shape.len()];
        let mut rest = flat;
        for (pos, &cells) in shape.iter().enumerate().rev() {
            label[pos] = rest % cells;
            rest /= cells;
        }
        let mut current = rho0.matrix().clone();
        for (event, (u, fam)) in spec.events().iter().enumerate() {
            let evolved = u.matrix() * current * u.matrix().adjoint();
            let p = fam.projector(label[event]);
            current = p * evolved * p;
        }
        let w: Complex64 = current.trace();
        weights.push(w.re);
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density_matrix, random_projector_family, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_spec(rng: &mut ChaCha8Rng, dim: usize, events: usize, cells: usize) -> HistorySpec {
        let evs = (0..events)
            .map(|_| (random_unitary(rng, dim), random_projector_family(rng, dim, cells)))
            .collect();
        HistorySpec::new(evs).expect("consistent dimensions")
    }

    #[test]
    fn label_flattening_is_row_major_first_event_slowest() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = random_spec(&mut rng, 4, 2, 2);
        let rho = random_density_matrix(&mut rng, 4);
        let d = decoherence_functional(&rho, &spec).expect("valid functional");
        assert_eq!(d.shape(), &[2, 2]);
        assert_eq!(d.label_of_index(0), vec![0, 0]);
        assert_eq!(d.label_of_index(1), vec![0, 1], "second event is the fast index");
        assert_eq!(d.label_of_index(2), vec![1, 0]);
        assert_eq!(d.index_of_label(&[1, 1]), 3);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (dim, events, cells) in [(4usize, 1usize, 2usize), (8, 2, 2), (8, 3, 3)] {
            let spec = random_spec(&mut rng, dim, events, cells);
            let rho = random_density_matrix(&mut rng, dim);
            let d = decoherence_functional(&rho, &spec).expect("valid functional");
            let sum: f64 = history_probabilities(&d).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-10, "probability sum {sum}");
        }
    }

    #[test]
    fn diagonal_matches_selective_evolution_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let spec = random_spec(&mut rng, 8, 3, 2);
        let rho = random_density_matrix(&mut rng, 8);
        let d = decoherence_functional(&rho, &spec).expect("valid functional");
        let oracle = branch_weights_by_selection(&rho, &spec).expect("valid");
        for (k, (&w, p)) in oracle.iter().zip(history_probabilities(&d)).enumerate() {
            assert!((w - p).abs() <= 1e-11, "branch {k}: chain {p} vs selection {w}");
        }
    }

    #[test]
    fn single_event_diagonal_is_cell_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let dim = 4;
        let fam = random_projector_family(&mut rng, dim, 2);
        let rho = random_density_matrix(&mut rng, dim);
        let spec = HistorySpec::new(vec![(UnitaryMap::identity_map(dim), fam.clone())]).expect("valid");
        let d = decoherence_functional(&rho, &spec).expect("valid functional");
        for alpha in 0..2 {
            let w = trace_product(rho.matrix(), fam.projector(alpha)).re;
            assert!((d.matrix()[(alpha, alpha)].re - w).abs() <= 1e-12);
        }
    }

    #[test]
    fn commuting_cells_decohere_exactly() {
        // diagonal state, diagonal cells, identity evolution: no off-diagonals
        let rho = DensityMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4]).expect("valid");
        let fam = ProjectorFamily::from_diagonal_labels(&[0.0, 0.0, 1.0, 1.0]).expect("valid");
        let spec = HistorySpec::new(vec![
            (UnitaryMap::identity_map(4), fam.clone()),
            (UnitaryMap::identity_map(4), fam),
        ])
        .expect("valid");
        let d = decoherence_functional(&rho, &spec).expect("valid functional");
        assert!(decoheres(&d, 1e-14), "off-diagonal {}", d.max_offdiagonal());
    }

    #[test]
    fn support_cardinality_counts_occupied_amplitudes() {
        let s = 0.5f64.sqrt();
        let v = crate::qstate::CVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::ZERO,
            Complex64::ZERO,
        ]);
        let psi = PureState::new(v).expect("unit norm");
        assert_eq!(support_cardinality(&psi, 1e-10), 2);
    }
}
