//! Validated quantum state types and channel primitives.
//!
//! - [`DensityMatrix`], [`PureState`], [`ProjectorFamily`], [`UnitaryMap`],
//!   [`KrausMap`] enforce their defining contracts at construction
//!   (tolerances in [`crate::tol`]).
//! - Free functions implement the channel toolbox: tensor products, pinching,
//!   conditioning on a cell, partial trace, and decoherence diagnostics.
//!
//! Conventions: the left tensor factor carries the slow index, all matrices
//! are dense complex, and eigenvalue-based checks go through the Hermitian
//! eigendecomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

/// Dense complex matrix used throughout.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector used throughout.
pub type CVector = DVector<Complex64>;

/// Errors raised by state construction and channel application.
#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not Hermitian: max entry deviation {dev:.3e}")]
    NotHermitian { dev: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },
    #[error("trace deviates from one by {dev:.3e}")]
    TraceNotOne { dev: f64 },
    #[error("vector norm deviates from one by {dev:.3e}")]
    NotNormalized { dev: f64 },
    #[error("projector {index} violates idempotence or Hermiticity: deviation {dev:.3e}")]
    NotAProjector { index: usize, dev: f64 },
    #[error("projectors {a} and {b} are not orthogonal: max entry {dev:.3e}")]
    NotOrthogonal { a: usize, b: usize, dev: f64 },
    #[error("projector family does not sum to the identity: max entry deviation {dev:.3e}")]
    IncompleteFamily { dev: f64 },
    #[error("matrix is not unitary: max entry deviation of U^dag U from I is {dev:.3e}")]
    NotUnitary { dev: f64 },
    #[error("Kraus operators are not trace preserving: max entry deviation {dev:.3e}")]
    NotTracePreserving { dev: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cell weight {weight:.3e} is at or below the zero-weight floor")]
    ZeroWeight { weight: f64 },
    #[error("empty input: {what}")]
    Empty { what: &'static str },
    #[error("invalid factor specification: {what}")]
    BadFactorSpec { what: String },
}

/// Result alias for state-level operations.
pub type Result<T, E = StateError> = std::result::Result<T, E>;

/// Max absolute entry of a matrix.
pub fn max_entry_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max entry deviation of `m` from Hermitian symmetry.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `sum_ij a_ij b_ji`, the trace of `a * b` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Max entry of the commutator `a b - b a`.
pub fn commutator_max_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_entry_norm(&(a * b - b * a))
}

fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Eigenvalues of a Hermitian matrix, ascending: Householder reduction to a
/// real symmetric tridiagonal followed by eigenvalue-only implicit-shift QL
/// iteration (no eigenvectors are accumulated, which is what makes this much
/// faster than a full symmetric eigendecomposition).
fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 1 {
        return vec![m[(0, 0)].re];
    }
    let (diag, off) = nalgebra::SymmetricTridiagonal::new(m.clone()).unpack_tridiagonal();
    let mut d: Vec<f64> = diag.iter().copied().collect();
    let mut e: Vec<f64> = off.iter().copied().collect();
    e.push(0.0);
    tridiagonal_eigenvalues(&mut d, &mut e);
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    d
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix with
/// diagonal `d` and subdiagonal `e` (same length, last entry of `e` unused);
/// overwrites `d` with the eigenvalues in no particular order.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    // Absolute deflation floor at machine epsilon times the matrix scale:
    // rank-deficient inputs leave stretches of the diagonal near zero where a
    // purely relative off-diagonal test would never fire, and deflating at
    // eps * ||T|| perturbs every eigenvalue by at most that same amount.
    let floor = f64::EPSILON
        * d.iter()
            .chain(e.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * scale + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations <= 64, "eigenvalue iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Fast positive-semidefiniteness test down to `floor`: Cholesky-factorizes
/// `m - floor * I` and rejects on any nonpositive pivot. A `false` is not
/// conclusive at the boundary, so callers fall back to eigenvalues there.
fn cholesky_psd(m: &CMatrix, floor: f64) -> bool {
    let n = m.nrows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= Complex64::from(floor);
    }
    for j in 0..n {
        let mut pivot = a[(j, j)].re;
        for k in 0..j {
            pivot -= a[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return false;
        }
        let root = pivot.sqrt();
        a[(j, j)] = Complex64::from(root);
        for i in j + 1..n {
            let mut entry = a[(i, j)];
            for k in 0..j {
                entry -= a[(i, k)] * a[(j, k)].conj();
            }
            a[(i, j)] = entry / root;
        }
    }
    true
}

/// Unit-trace positive-semidefinite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positivity of `mat`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(StateError::DimensionMismatch { expected: mat.nrows().max(1), found: mat.ncols() });
        }
        let dev = hermiticity_deviation(&mat);
        if dev > tol::HERMITIAN {
            return Err(StateError::NotHermitian { dev });
        }
        let tr_dev = (mat.trace() - Complex64::ONE).norm();
        if tr_dev > tol::TRACE {
            return Err(StateError::TraceNotOne { dev: tr_dev });
        }
        // Positivity down to the tolerance floor is equivalent to the shifted
        // matrix being positive definite, which a pivot-checked Cholesky
        // factorization decides much faster than an eigendecomposition; the
        // eigenvalue is only computed when that fast path rejects.
        if !cholesky_psd(&mat, tol::EIG_FLOOR) {
            let min_eig = hermitian_eigenvalues(&mat)[0];
            if min_eig < tol::EIG_FLOOR {
                return Err(StateError::NotPositive { min_eig });
            }
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is positive by construction (e.g. a convex sum of
    /// outer products), skipping the eigenvalue check that `new` performs.
    pub(crate) fn trusted(mat: CMatrix) -> Self {
        debug_assert!(hermiticity_deviation(&mat) <= tol::HERMITIAN);
        debug_assert!((mat.trace() - Complex64::ONE).norm() <= 1e-9);
        Self { mat }
    }

    /// Rank-one state `|psi><psi|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        let mat = CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj());
        Self { mat }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: identity(dim).scale(1.0 / dim as f64) }
    }

    /// Diagonal state from a probability vector (must sum to one).
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(StateError::Empty { what: "probability vector" });
        }
        if let Some(&p) = probs.iter().find(|&&p| p < 0.0) {
            return Err(StateError::NotPositive { min_eig: p });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol::TRACE {
            return Err(StateError::TraceNotOne { dev: (sum - 1.0).abs() });
        }
        let mat = CMatrix::from_fn(probs.len(), probs.len(), |i, j| {
            if i == j { Complex64::new(probs[i], 0.0) } else { Complex64::ZERO }
        });
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Eigenvalues with values at or below the clip threshold dropped to zero.
    pub fn eigenvalues_clipped(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
            .into_iter()
            .map(|w| if w <= tol::ENTROPY_CLIP { 0.0 } else { w })
            .collect()
    }
}

/// Unit-norm complex state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Validates unit norm.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(StateError::Empty { what: "amplitude vector" });
        }
        let dev = (amps.norm() - 1.0).abs();
        if dev > tol::NORM {
            return Err(StateError::NotNormalized { dev });
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm; errors on the zero vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(StateError::Empty { what: "amplitude vector" });
        }
        let n = amps.norm();
        if n <= tol::WEIGHT_FLOOR {
            return Err(StateError::NotNormalized { dev: 1.0 });
        }
        Ok(Self { amps: amps.unscale(n) })
    }

    /// Computational basis vector `|idx>`.
    pub fn basis_state(dim: usize, idx: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[idx] = Complex64::ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `<self, other>` with the left argument conjugated.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }
}

/// Orthogonal resolution of the identity with one real label per cell.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    projectors: Vec<CMatrix>,
    labels: Vec<f64>,
    /// Cell index per basis state when every projector is exactly diagonal
    /// with 0/1 entries; lets the pinch act entrywise instead of by matrix
    /// products.
    diagonal_cells: Option<Vec<usize>>,
}

/// Cell index per basis state if the family is exactly diagonal 0/1.
fn exact_diagonal_cells(projectors: &[CMatrix]) -> Option<Vec<usize>> {
    let dim = projectors[0].nrows();
    let mut cell_of = vec![usize::MAX; dim];
    for (k, p) in projectors.iter().enumerate() {
        for i in 0..dim {
            for j in 0..dim {
                let v = p[(i, j)];
                if i == j && v == Complex64::ONE {
                    if cell_of[i] != usize::MAX {
                        return None;
                    }
                    cell_of[i] = k;
                } else if v != Complex64::ZERO {
                    return None;
                }
            }
        }
    }
    cell_of.iter().all(|&c| c != usize::MAX).then_some(cell_of)
}

impl ProjectorFamily {
    /// Validates idempotence, Hermiticity, pairwise orthogonality, and
    /// completeness of the cells.
    pub fn new(projectors: Vec<CMatrix>, labels: Vec<f64>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(StateError::Empty { what: "projector family" });
        }
        if labels.len() != projectors.len() {
            return Err(StateError::DimensionMismatch { expected: projectors.len(), found: labels.len() });
        }
        let dim = projectors[0].nrows();
        for (k, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(StateError::DimensionMismatch { expected: dim, found: p.nrows() });
            }
            let herm = hermiticity_deviation(p);
            let idem = max_entry_norm(&(p * p - p));
            let dev = herm.max(idem);
            if dev > tol::PROJECTOR {
                return Err(StateError::NotAProjector { index: k, dev });
            }
        }
        for a in 0..projectors.len() {
            for b in (a + 1)..projectors.len() {
                let dev = max_entry_norm(&(&projectors[a] * &projectors[b]));
                if dev > tol::PROJECTOR {
                    return Err(StateError::NotOrthogonal { a, b, dev });
                }
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &projectors {
            sum += p;
        }
        let dev = max_entry_norm(&(sum - identity(dim)));
        if dev > tol::PROJECTOR {
            return Err(StateError::IncompleteFamily { dev });
        }
        let diagonal_cells = exact_diagonal_cells(&projectors);
        Ok(Self { projectors, labels, diagonal_cells })
    }

    /// Rank-one cells along the computational basis, labelled by index.
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                CMatrix::from_fn(dim, dim, |i, j| {
                    if i == k && j == k { Complex64::ONE } else { Complex64::ZERO }
                })
            })
            .collect();
        Self {
            projectors,
            labels: (0..dim).map(|k| k as f64).collect(),
            diagonal_cells: Some((0..dim).collect()),
        }
    }

    /// Diagonal cells grouping basis indices by label; one cell per distinct
    /// label value in `diagonal`, ordered by first appearance.
    pub fn from_diagonal_labels(diagonal: &[f64]) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(StateError::Empty { what: "diagonal labels" });
        }
        let dim = diagonal.len();
        let mut labels: Vec<f64> = Vec::new();
        for &v in diagonal {
            if !labels.iter().any(|&u| u == v) {
                labels.push(v);
            }
        }
        let projectors = labels
            .iter()
            .map(|&v| {
                CMatrix::from_fn(dim, dim, |i, j| {
                    if i == j && diagonal[i] == v { Complex64::ONE } else { Complex64::ZERO }
                })
            })
            .collect();
        let cell_of = diagonal
            .iter()
            .map(|v| labels.iter().position(|u| u == v).expect("label recorded above"))
            .collect();
        Ok(Self { projectors, labels, diagonal_cells: Some(cell_of) })
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn projector(&self, alpha: usize) -> &CMatrix {
        &self.projectors[alpha]
    }

    pub fn label(&self, alpha: usize) -> f64 {
        self.labels[alpha]
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// Cell index per basis state if every cell is diagonal in the
    /// computational basis.
    pub(crate) fn diagonal_cells(&self) -> Option<&[usize]> {
        self.diagonal_cells.as_deref()
    }
}

/// Validated unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryMap {
    mat: CMatrix,
}

impl UnitaryMap {
    /// Validates `U^dag U = I`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(StateError::DimensionMismatch { expected: mat.nrows().max(1), found: mat.ncols() });
        }
        let dev = max_entry_norm(&(mat.adjoint() * &mat - identity(mat.nrows())));
        if dev > tol::UNITARY {
            return Err(StateError::NotUnitary { dev });
        }
        Ok(Self { mat })
    }

    pub fn identity_map(dim: usize) -> Self {
        Self { mat: identity(dim) }
    }

    /// `exp(-i h t)` built from the eigendecomposition of the Hermitian
    /// generator `h`.
    pub fn from_hermitian_generator(h: &CMatrix, t: f64) -> Result<Self> {
        let dev = hermiticity_deviation(h);
        if dev > tol::HERMITIAN {
            return Err(StateError::NotHermitian { dev });
        }
        let eig = h.clone().symmetric_eigen();
        let phases = CVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&w| Complex64::from_polar(1.0, -w * t)),
        );
        let v = &eig.eigenvectors;
        let mut mat = CMatrix::zeros(h.nrows(), h.ncols());
        for k in 0..phases.len() {
            let col = v.column(k);
            for i in 0..h.nrows() {
                for j in 0..h.ncols() {
                    mat[(i, j)] += col[i] * phases[k] * col[j].conj();
                }
            }
        }
        UnitaryMap::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `U rho U^dag`.
    pub fn evolve_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(StateError::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        DensityMatrix::new(&self.mat * rho.matrix() * self.mat.adjoint())
    }

    /// `U |psi>`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dim() {
            return Err(StateError::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        PureState::new(&self.mat * psi.amplitudes())
    }
}

/// Trace-preserving set of Kraus operators on a fixed dimension.
#[derive(Debug, Clone)]
pub struct KrausMap {
    ops: Vec<CMatrix>,
}

impl KrausMap {
    /// Validates `sum_k K_k^dag K_k = I`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(StateError::Empty { what: "Kraus operator list" });
        }
        let dim = ops[0].ncols();
        for k in &ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(StateError::DimensionMismatch { expected: dim, found: k.nrows() });
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &ops {
            sum += k.adjoint() * k;
        }
        let dev = max_entry_norm(&(sum - identity(dim)));
        if dev > tol::KRAUS {
            return Err(StateError::NotTracePreserving { dev });
        }
        Ok(Self { ops })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].ncols()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `sum_k K_k rho K_k^dag`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(StateError::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for k in &self.ops {
            out += k * rho.matrix() * k.adjoint();
        }
        DensityMatrix::new(out)
    }
}

/// Kronecker product; the left factor carries the slow index.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of state vectors; the left factor carries the slow index.
pub fn tensor_states(a: &PureState, b: &PureState) -> PureState {
    let (da, db) = (a.dim(), b.dim());
    let amps = CVector::from_fn(da * db, |i, _| a.amplitudes()[i / db] * b.amplitudes()[i % db]);
    PureState { amps }
}

/// Pinching channel `rho -> sum_a P_a rho P_a`.
pub fn pinch(rho: &DensityMatrix, cells: &ProjectorFamily) -> Result<DensityMatrix> {
    if rho.dim() != cells.dim() {
        return Err(StateError::DimensionMismatch { expected: cells.dim(), found: rho.dim() });
    }
    // A diagonal family acts entrywise: the pinch keeps exactly the entries
    // whose row and column indices fall in the same cell, so the matrix
    // products (and the revalidation of their sum) can be skipped.
    if let Some(cell_of) = cells.diagonal_cells() {
        let mut out = rho.matrix().clone();
        for j in 0..rho.dim() {
            for i in 0..rho.dim() {
                if cell_of[i] != cell_of[j] {
                    out[(i, j)] = Complex64::ZERO;
                }
            }
        }
        return Ok(DensityMatrix::trusted(out));
    }
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for p in cells.projectors() {
        out += p * rho.matrix() * p;
    }
    DensityMatrix::new(out)
}

/// Weight `w_a = Tr(P_a rho)` and normalized conditional state
/// `P_a rho P_a / w_a` for cell `alpha`.
pub fn conditional_state(
    rho: &DensityMatrix,
    cells: &ProjectorFamily,
    alpha: usize,
) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != cells.dim() {
        return Err(StateError::DimensionMismatch { expected: cells.dim(), found: rho.dim() });
    }
    let p = cells.projector(alpha);
    let w = trace_product(rho.matrix(), p).re;
    if w <= tol::WEIGHT_FLOOR {
        return Err(StateError::ZeroWeight { weight: w });
    }
    let cond = (p * rho.matrix() * p).unscale(w);
    Ok((DensityMatrix::new(cond)?, w))
}

/// Mixed-radix strides for a factor-dimension list (slow index first).
fn strides(factor_dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; factor_dims.len()];
    for i in (0..factor_dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * factor_dims[i + 1];
    }
    s
}

/// Partial trace over all factors not listed in `keep`.
///
/// `factor_dims` lists the tensor factors left to right (slow index first);
/// `keep` lists the factor indices to retain, in ascending order.
pub fn partial_trace(
    rho: &DensityMatrix,
    factor_dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix> {
    let total: usize = factor_dims.iter().product();
    if total != rho.dim() || factor_dims.is_empty() {
        return Err(StateError::DimensionMismatch { expected: rho.dim(), found: total });
    }
    if keep.is_empty() {
        return Err(StateError::BadFactorSpec { what: "keep list is empty".into() });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().expect("nonempty") >= factor_dims.len() {
        return Err(StateError::BadFactorSpec {
            what: format!("keep list {keep:?} must be ascending indices into {factor_dims:?}"),
        });
    }
    let traced: Vec<usize> = (0..factor_dims.len()).filter(|i| !keep.contains(i)).collect();
    let st = strides(factor_dims);
    let keep_dims: Vec<usize> = keep.iter().map(|&i| factor_dims[i]).collect();
    let keep_strides = strides(&keep_dims);
    let out_dim: usize = keep_dims.iter().product();
    let traced_dim: usize = traced.iter().map(|&i| factor_dims[i]).product();

    let mut out = CMatrix::zeros(out_dim, out_dim);
    let decode = |flat: usize, dims: &[usize]| -> Vec<usize> {
        let mut rest = flat;
        dims.iter()
            .rev()
            .map(|&d| {
                let v = rest % d;
                rest /= d;
                v
            })
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect()
    };
    let traced_dims: Vec<usize> = traced.iter().map(|&i| factor_dims[i]).collect();
    for row_out in 0..out_dim {
        let row_digits = decode(row_out, &keep_dims);
        for col_out in 0..out_dim {
            let col_digits = decode(col_out, &keep_dims);
            let mut acc = Complex64::ZERO;
            for tr in 0..traced_dim {
                let tr_digits = decode(tr, &traced_dims);
                let mut row_full = 0usize;
                let mut col_full = 0usize;
                for (pos, &f) in keep.iter().enumerate() {
                    row_full += row_digits[pos] * st[f];
                    col_full += col_digits[pos] * st[f];
                }
                for (pos, &f) in traced.iter().enumerate() {
                    row_full += tr_digits[pos] * st[f];
                    col_full += tr_digits[pos] * st[f];
                }
                acc += rho.matrix()[(row_full, col_full)];
            }
            out[(row_out, col_out)] = acc;
        }
    }
    let _ = keep_strides;
    DensityMatrix::new(out)
}

/// Trace norm of `|psi1><psi1| - |psi2><psi2|` via the closed form
/// `2 sqrt(1 - |<psi1, psi2>|^2)`.
pub fn trace_norm_pure_diff(psi1: &PureState, psi2: &PureState) -> f64 {
    let ov = psi1.inner(psi2).norm_sqr();
    2.0 * (1.0 - ov).max(0.0).sqrt()
}

/// True when every cell commutes with `rho` to within `tolerance`
/// (max-entry norm of each commutator).
pub fn is_decoherent(rho: &DensityMatrix, cells: &ProjectorFamily, tolerance: f64) -> bool {
    cells
        .projectors()
        .iter()
        .all(|p| commutator_max_norm(p, rho.matrix()) <= tolerance)
}

/// Mean expectation `(1/N) sum_i Tr(rho O_i)` over already-embedded
/// observables; returns zero for an empty list.
pub fn mean_observable(rho: &DensityMatrix, observables: &[CMatrix]) -> f64 {
    if observables.is_empty() {
        return 0.0;
    }
    let mean: Complex64 = observables
        .iter()
        .map(|o| trace_product(rho.matrix(), o))
        .sum::<Complex64>()
        / Complex64::new(observables.len() as f64, 0.0);
    debug_assert!(mean.im.abs() <= 1e-10, "mean observable has imaginary part {}", mean.im);
    mean.re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    fn plus_state() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).expect("unit norm")
    }

    #[test]
    fn density_matrix_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(m), Err(StateError::NotHermitian { .. })));
    }

    #[test]
    fn density_matrix_rejects_negative_eigenvalue() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(DensityMatrix::new(m), Err(StateError::NotPositive { .. })));
    }

    #[test]
    fn density_matrix_rejects_wrong_trace() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)]);
        assert!(matches!(DensityMatrix::new(m), Err(StateError::TraceNotOne { .. })));
    }

    #[test]
    fn pure_state_rejects_bad_norm() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(PureState::new(v), Err(StateError::NotNormalized { .. })));
    }

    #[test]
    fn tensor_left_factor_is_slow_index() {
        // sigma_x (x) sigma_x maps |00> (index 0) to |11> (index 3)
        let t = tensor(&sigma_x(), &sigma_x());
        assert_eq!(t.nrows(), 4);
        assert_eq!(t[(3, 0)], c(1.0, 0.0), "|00> must map to |11>");
        // e1 (x) e0 sits at flat index 1*2 + 0 = 2
        let a = PureState::basis_state(2, 1);
        let b = PureState::basis_state(2, 0);
        let ab = tensor_states(&a, &b);
        assert_eq!(ab.amplitudes()[2], c(1.0, 0.0), "left factor must be the slow index");
    }

    #[test]
    fn pinch_matches_triple_product_oracle() {
        let rho = DensityMatrix::from_pure(&plus_state());
        let cells = ProjectorFamily::computational(2);
        let pinched = pinch(&rho, &cells).expect("dims match");
        // oracle: explicit sum of P_a rho P_a
        let mut oracle = CMatrix::zeros(2, 2);
        for p in cells.projectors() {
            oracle += p * rho.matrix() * p;
        }
        assert!(max_entry_norm(&(pinched.matrix() - oracle)) <= 1e-15);
        // pinched |+><+| in the computational family is I/2
        assert!((pinched.matrix()[(0, 0)].re - 0.5).abs() <= 1e-15);
        assert!(pinched.matrix()[(0, 1)].norm() <= 1e-15, "off-diagonal must vanish");
    }

    #[test]
    fn pinch_is_idempotent() {
        let rho = DensityMatrix::from_pure(&plus_state());
        let cells = ProjectorFamily::computational(2);
        let once = pinch(&rho, &cells).expect("dims match");
        let twice = pinch(&once, &cells).expect("dims match");
        assert!(max_entry_norm(&(once.matrix() - twice.matrix())) <= 1e-14);
    }

    #[test]
    fn conditional_state_zero_weight_is_an_error() {
        let rho = DensityMatrix::from_pure(&PureState::basis_state(2, 0));
        let cells = ProjectorFamily::computational(2);
        let res = conditional_state(&rho, &cells, 1);
        assert!(matches!(res, Err(StateError::ZeroWeight { .. })));
        let (cond, w) = conditional_state(&rho, &cells, 0).expect("weight one");
        assert!((w - 1.0).abs() <= 1e-14);
        assert!((cond.matrix()[(0, 0)].re - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = DensityMatrix::from_diagonal(&[0.25, 0.75]).expect("valid");
        let b = DensityMatrix::from_pure(&plus_state());
        let joint = DensityMatrix::new(tensor(a.matrix(), b.matrix())).expect("valid product");
        let back_a = partial_trace(&joint, &[2, 2], &[0]).expect("valid spec");
        assert!(max_entry_norm(&(back_a.matrix() - a.matrix())) <= 1e-14);
        let back_b = partial_trace(&joint, &[2, 2], &[1]).expect("valid spec");
        assert!(max_entry_norm(&(back_b.matrix() - b.matrix())) <= 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]))
            .expect("unit norm");
        let rho = DensityMatrix::from_pure(&bell);
        let red = partial_trace(&rho, &[2, 2], &[1]).expect("valid spec");
        assert!(max_entry_norm(&(red.matrix() - DensityMatrix::maximally_mixed(2).matrix())) <= 1e-14);
    }

    #[test]
    fn partial_trace_three_factors_middle_kept() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::from_diagonal(&[0.1, 0.2, 0.7]).expect("valid");
        let d = DensityMatrix::from_pure(&PureState::basis_state(2, 1));
        let joint = DensityMatrix::new(tensor(&tensor(a.matrix(), b.matrix()), d.matrix())).expect("valid");
        let red = partial_trace(&joint, &[2, 3, 2], &[1]).expect("valid spec");
        assert!(max_entry_norm(&(red.matrix() - b.matrix())) <= 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_keep_list() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[1, 0]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
        assert!(partial_trace(&rho, &[3, 2], &[0]).is_err());
    }

    #[test]
    fn trace_norm_closed_form_matches_svd_oracle() {
        let psi1 = plus_state();
        let psi2 = PureState::basis_state(2, 0);
        let closed = trace_norm_pure_diff(&psi1, &psi2);
        let diff = DensityMatrix::from_pure(&psi1).into_matrix() - DensityMatrix::from_pure(&psi2).into_matrix();
        let oracle: f64 = diff.svd(false, false).singular_values.iter().sum();
        assert!((closed - oracle).abs() <= 1e-12, "closed {closed} vs svd {oracle}");
        // orthogonal states reach the maximum 2
        let e0 = PureState::basis_state(2, 0);
        let e1 = PureState::basis_state(2, 1);
        assert!((trace_norm_pure_diff(&e0, &e1) - 2.0).abs() <= 1e-14);
        // identical states give 0
        assert!(trace_norm_pure_diff(&e0, &e0) <= 1e-12);
    }

    #[test]
    fn decoherence_check_distinguishes_diagonal_from_coherent() {
        let cells = ProjectorFamily::computational(2);
        let diag = DensityMatrix::from_diagonal(&[0.3, 0.7]).expect("valid");
        assert!(is_decoherent(&diag, &cells, 1e-10));
        let coherent = DensityMatrix::from_pure(&plus_state());
        assert!(!is_decoherent(&coherent, &cells, 1e-10));
    }

    #[test]
    fn mean_observable_on_maximally_mixed_vanishes() {
        let rho = DensityMatrix::maximally_mixed(2);
        let val = mean_observable(&rho, &[sigma_z()]);
        assert!(val.abs() <= 1e-14, "mean sigma_z on I/2 should vanish: {val}");
        assert_eq!(mean_observable(&rho, &[]), 0.0);
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(UnitaryMap::new(m), Err(StateError::NotUnitary { .. })));
    }

    #[test]
    fn generator_exponential_matches_phase_rotation() {
        // exp(-i sigma_z t) = diag(e^{-it}, e^{+it})
        let t = 0.7;
        let u = UnitaryMap::from_hermitian_generator(&sigma_z(), t).expect("valid");
        assert!((u.matrix()[(0, 0)] - Complex64::from_polar(1.0, -t)).norm() <= 1e-12);
        assert!((u.matrix()[(1, 1)] - Complex64::from_polar(1.0, t)).norm() <= 1e-12);
        assert!(u.matrix()[(0, 1)].norm() <= 1e-12);
    }

    #[test]
    fn unitary_evolution_preserves_validity() {
        let u = UnitaryMap::from_hermitian_generator(&sigma_x(), 1.3).expect("valid");
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.8]).expect("valid");
        let evolved = u.evolve_density(&rho).expect("valid evolution");
        assert!((evolved.matrix().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn kraus_rejects_non_trace_preserving() {
        let half = sigma_x().scale(0.5);
        assert!(matches!(KrausMap::new(vec![half]), Err(StateError::NotTracePreserving { .. })));
    }

    #[test]
    fn kraus_dephasing_removes_coherence() {
        let p0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let p1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let map = KrausMap::new(vec![p0, p1]).expect("projective Kraus set");
        let out = map.apply(&DensityMatrix::from_pure(&plus_state())).expect("valid");
        assert!(out.matrix()[(0, 1)].norm() <= 1e-14);
        assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn projector_family_rejects_incomplete_or_overlapping_cells() {
        let p0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            ProjectorFamily::new(vec![p0.clone()], vec![0.0]),
            Err(StateError::IncompleteFamily { .. })
        ));
        assert!(matches!(
            ProjectorFamily::new(vec![p0.clone(), p0.clone()], vec![0.0, 1.0]),
            Err(StateError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn diagonal_label_family_groups_cells() {
        let fam = ProjectorFamily::from_diagonal_labels(&[1.0, -1.0, 1.0]).expect("valid");
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.label(0), 1.0);
        assert_eq!(fam.label(1), -1.0);
        assert_eq!(fam.projector(0)[(2, 2)], c(1.0, 0.0));
        assert_eq!(fam.projector(1)[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn diagonal_family_pinch_matches_dense_products() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x9143);
        let rho = crate::random::random_density_matrix(&mut rng, 6);
        let cells =
            ProjectorFamily::from_diagonal_labels(&[2.0, -1.0, 2.0, 0.0, -1.0, 2.0]).expect("valid");
        assert!(cells.diagonal_cells().is_some(), "family should be recognized as diagonal");
        let fast = pinch(&rho, &cells).expect("dims match");
        let mut dense = CMatrix::zeros(6, 6);
        for p in cells.projectors() {
            dense += p * rho.matrix() * p;
        }
        assert!(
            max_entry_norm(&(fast.matrix() - dense)) <= 1e-14,
            "masked pinch must agree with the projector products"
        );
    }

    #[test]
    fn eigenvalue_solver_matches_full_decomposition() {
        use rand::{Rng, SeedableRng};
        use rand_distr::StandardNormal;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x0051_c3a7);
        for dim in [2usize, 3, 5, 8, 16, 32] {
            let g = CMatrix::from_fn(dim, dim, |_, _| {
                c(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let h = (&g + g.adjoint()).scale(0.5);
            let fast = hermitian_eigenvalues(&h);
            let mut full: Vec<f64> =
                h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            full.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            for (a, b) in fast.iter().zip(&full) {
                assert!(
                    (a - b).abs() <= 1e-10 * dim as f64,
                    "eigenvalue mismatch at dim {dim}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn eigenvalue_solver_handles_degenerate_spectra() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x0d96e);
        let spectrum = [-1.0, -1.0, 0.0, 0.0, 0.0, 2.0, 2.0, 5.0];
        let u = crate::random::random_unitary(&mut rng, spectrum.len());
        let diag = CMatrix::from_fn(spectrum.len(), spectrum.len(), |i, j| {
            if i == j { c(spectrum[i], 0.0) } else { c(0.0, 0.0) }
        });
        let h = u.matrix() * diag * u.matrix().adjoint();
        let got = hermitian_eigenvalues(&h);
        for (a, b) in got.iter().zip(&spectrum) {
            assert!((a - b).abs() <= 1e-10, "degenerate spectrum mismatch: {a} vs {b}");
        }
    }
}
