//! Permutation-avalanche spin registers probing non-monotonic entropy.
//!
//! An even register of `n` spins evolves by a two-stage deterministic step:
//! every ordered pair `(2k-1, 2k)` flips its even member iff its odd member is
//! down, then a fixed permutation moves the content of site `j` to site
//! `pi(j)`. The map sends computational basis states to basis states, so the
//! minus-branch dynamics is a finite permutation cycle and every diagnostic
//! (orbit dimension, sector dimensions, time-averaged magnetization, entropy
//! trace) is exact.
//!
//! Conventions: site `j` (1-based) is bit `n - j` of a configuration word, a
//! set bit means spin down, the permutation is a 1-based image list (one-line
//! form), and magnetizations are reported in half-spin units (total `sigma^3`
//! over two). Sector labels are total `sigma^3` eigenvalues
//! `{-n, -n+2, ..., n}`. The two-cell family splits configurations by the
//! sign of the total spin, with zero assigned to the negative cell.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::entropy::{self, EntropyError};
use crate::qstate::{CMatrix, CVector, DensityMatrix, ProjectorFamily, PureState, StateError, UnitaryMap};

/// Largest register for which dense matrices (pinching, unitaries) are built.
pub const DENSE_CAP_SITES: usize = 10;

/// Largest register for which orbits are enumerated.
pub const ORBIT_CAP_SITES: usize = 12;

/// Largest register accepted at all (configurations must fit a machine word).
pub const MAX_SITES: usize = 24;

/// Errors from the avalanche register.
#[derive(Debug, Error)]
pub enum AvalancheError {
    /// The register must have an even, positive, bounded number of sites.
    #[error("register must have an even number of sites between 2 and {MAX_SITES}, got {n_sites}")]
    BadSiteCount { n_sites: usize },
    /// The site movement must be a bijection given as a 1-based image list.
    #[error("permutation is not a bijection on 1..={n_sites}")]
    BadPermutation { n_sites: usize },
    /// Branch amplitudes must satisfy `|c_plus|^2 + |c_minus|^2 = 1`.
    #[error("amplitude norms sum to {norm_sq}, expected 1")]
    BadAmplitudes { norm_sq: f64 },
    /// At least one step must be requested.
    #[error("step count must be positive")]
    BadSteps,
    /// The state dimension does not match the register.
    #[error("state dimension {found} does not match register dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    /// The requested register is too large for the chosen representation.
    #[error("register of {n_sites} sites exceeds the cap of {cap_sites} sites")]
    DimensionCap { n_sites: usize, cap_sites: usize },
    /// The orbit grew past the configured bound.
    #[error("orbit exceeded the configured cap of {cap} states")]
    OrbitCap { cap: usize },
    /// State-level validation failure.
    #[error(transparent)]
    State(#[from] StateError),
    /// Entropy-level failure.
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// Register size, site movement, step budget, and branch amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AvalancheParams {
    /// Even number of apparatus spins.
    pub n_sites: usize,
    /// One-line image list: the content of site `j` moves to `permutation[j-1]`.
    pub permutation: Vec<usize>,
    /// Number of steps an entropy trace covers.
    pub steps: usize,
    /// Amplitude of the frozen all-up branch.
    pub c_plus: Complex64,
    /// Amplitude of the avalanche branch.
    pub c_minus: Complex64,
}

impl AvalancheParams {
    /// Validates register size, permutation, step count, and amplitudes.
    pub fn new(
        n_sites: usize,
        permutation: Vec<usize>,
        steps: usize,
        c_plus: Complex64,
        c_minus: Complex64,
    ) -> Result<Self, AvalancheError> {
        if n_sites == 0 || n_sites % 2 != 0 || n_sites > MAX_SITES {
            return Err(AvalancheError::BadSiteCount { n_sites });
        }
        let mut images = permutation.clone();
        images.sort_unstable();
        if images != (1..=n_sites).collect::<Vec<_>>() {
            return Err(AvalancheError::BadPermutation { n_sites });
        }
        if steps == 0 {
            return Err(AvalancheError::BadSteps);
        }
        let norm_sq = c_plus.norm_sqr() + c_minus.norm_sqr();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(AvalancheError::BadAmplitudes { norm_sq });
        }
        Ok(Self { n_sites, permutation, steps, c_plus, c_minus })
    }

    /// Balanced amplitudes with the cyclic movement `j -> j + 1 (mod n)`.
    pub fn cyclic(n_sites: usize, steps: usize) -> Result<Self, AvalancheError> {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let permutation = (1..=n_sites).map(|j| j % n_sites + 1).collect();
        Self::new(n_sites, permutation, steps, c, c)
    }
}

/// Total spin `sum sigma^3` of a configuration (ups minus downs).
pub fn total_spin(config: usize, n_sites: usize) -> i64 {
    n_sites as i64 - 2 * i64::from(config.count_ones())
}

/// The one-spin-down seed `|-,+,+,...,+>` of the avalanche branch.
pub fn minus_seed(n_sites: usize) -> usize {
    1 << (n_sites - 1)
}

/// Conditional pair stage: flips the even member of each ordered pair whose
/// odd member is down.
pub fn pair_flip(config: usize, n_sites: usize) -> usize {
    let mut out = config;
    for k in 0..n_sites / 2 {
        let odd_bit = n_sites - (2 * k + 1);
        let even_bit = n_sites - (2 * k + 2);
        if (config >> odd_bit) & 1 == 1 {
            out ^= 1 << even_bit;
        }
    }
    out
}

/// Movement stage: the content of site `j` moves to site `permutation[j-1]`.
pub fn permute_sites(config: usize, permutation: &[usize]) -> usize {
    let n = permutation.len();
    let mut out = 0;
    for j in 1..=n {
        let bit = (config >> (n - j)) & 1;
        out |= bit << (n - permutation[j - 1]);
    }
    out
}

/// One full classical step: all pair flips, then the site movement.
pub fn classical_step(config: usize, params: &AvalancheParams) -> usize {
    permute_sites(pair_flip(config, params.n_sites), &params.permutation)
}

/// One full quantum step on the register: a permutation of basis amplitudes.
pub fn avalanche_step(state: &PureState, params: &AvalancheParams) -> Result<PureState, AvalancheError> {
    let dim = 1usize << params.n_sites;
    if state.dim() != dim {
        return Err(AvalancheError::DimensionMismatch { expected: dim, found: state.dim() });
    }
    let mut amps = CVector::zeros(dim);
    for (config, &amp) in state.amplitudes().iter().enumerate() {
        amps[classical_step(config, params)] = amp;
    }
    Ok(PureState::new(amps)?)
}

/// Dense unitary of the pair stage for pair `k` (sites `2k-1`, `2k`),
/// identity elsewhere.
pub fn pair_unitary(n_sites: usize, k: usize) -> Result<UnitaryMap, AvalancheError> {
    if n_sites > DENSE_CAP_SITES {
        return Err(AvalancheError::DimensionCap { n_sites, cap_sites: DENSE_CAP_SITES });
    }
    debug_assert!(k >= 1 && 2 * k <= n_sites);
    let dim = 1usize << n_sites;
    let odd_bit = n_sites - (2 * k - 1);
    let even_bit = n_sites - 2 * k;
    let mut mat = CMatrix::zeros(dim, dim);
    for config in 0..dim {
        let image = if (config >> odd_bit) & 1 == 1 { config ^ (1 << even_bit) } else { config };
        mat[(image, config)] = Complex64::ONE;
    }
    Ok(UnitaryMap::new(mat)?)
}

/// Dense unitary of the movement stage.
pub fn permutation_unitary(params: &AvalancheParams) -> Result<UnitaryMap, AvalancheError> {
    if params.n_sites > DENSE_CAP_SITES {
        return Err(AvalancheError::DimensionCap { n_sites: params.n_sites, cap_sites: DENSE_CAP_SITES });
    }
    let dim = 1usize << params.n_sites;
    let mut mat = CMatrix::zeros(dim, dim);
    for config in 0..dim {
        mat[(permute_sites(config, &params.permutation), config)] = Complex64::ONE;
    }
    Ok(UnitaryMap::new(mat)?)
}

/// Orbit diagnostics of the avalanche branch.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    /// Number of distinct configurations the orbit visits.
    pub orbit_dim: usize,
    /// Projected-orbit dimension per total-spin eigenvalue.
    ///
    /// Orbit elements are distinct basis states, so the rank of the projected
    /// orbit equals the count of orbit configurations in each sector.
    pub sector_dims: BTreeMap<i64, usize>,
    /// Sum of total spins over the orbit.
    pub magnetization_sum: i64,
    /// Time-averaged magnetization in half-spin units:
    /// `magnetization_sum / (2 orbit_dim)`.
    pub mean_magnetization: f64,
    /// Coarse-grained entropy of the two-branch superposition at steps
    /// `0..=orbit_dim`; the closing entry repeats the first (periodicity).
    pub entropy_curve: Vec<f64>,
}

/// Orbit analysis from the standard one-spin-down seed.
pub fn orbit_analysis(params: &AvalancheParams) -> Result<OrbitReport, AvalancheError> {
    orbit_analysis_from(params, minus_seed(params.n_sites), 1 << params.n_sites)
}

/// Orbit analysis from an arbitrary seed configuration with an orbit bound.
///
/// The step is a bijection on configurations, so the orbit through any seed
/// is a pure cycle; iteration stops when the seed reappears. The entropy
/// curve uses the exact two-branch form: zero when the avalanche branch
/// shares the frozen branch's cell, the two-label mixing entropy otherwise.
pub fn orbit_analysis_from(
    params: &AvalancheParams,
    seed_config: usize,
    orbit_cap: usize,
) -> Result<OrbitReport, AvalancheError> {
    let n = params.n_sites;
    if n > ORBIT_CAP_SITES {
        return Err(AvalancheError::DimensionCap { n_sites: n, cap_sites: ORBIT_CAP_SITES });
    }
    let mut orbit = vec![seed_config];
    let mut config = classical_step(seed_config, params);
    while config != seed_config {
        if orbit.len() >= orbit_cap {
            return Err(AvalancheError::OrbitCap { cap: orbit_cap });
        }
        orbit.push(config);
        config = classical_step(config, params);
    }

    let mut sector_dims = BTreeMap::new();
    let mut magnetization_sum = 0i64;
    for &c in &orbit {
        let m = total_spin(c, n);
        *sector_dims.entry(m).or_insert(0) += 1;
        magnetization_sum += m;
    }
    let orbit_dim = orbit.len();
    let mean_magnetization = magnetization_sum as f64 / (2.0 * orbit_dim as f64);

    let mixing_entropy = entropy::shannon([params.c_plus.norm_sqr(), params.c_minus.norm_sqr()]);
    let entropy_curve = (0..=orbit_dim)
        .map(|t| {
            let c = orbit[t % orbit_dim];
            // the frozen all-up branch always sits in the positive cell
            if total_spin(c, n) > 0 { 0.0 } else { mixing_entropy }
        })
        .collect();

    Ok(OrbitReport { orbit_dim, sector_dims, magnetization_sum, mean_magnetization, entropy_curve })
}

/// One point of a dense entropy trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Step index, starting at zero.
    pub step: usize,
    /// Coarse-grained entropy of the evolving superposition.
    pub s_qb: f64,
    /// Von Neumann entropy (zero throughout: the state stays pure).
    pub s_vn: f64,
}

/// Dense entropy trace of `c_plus |all-up> + c_minus |avalanche branch>`.
///
/// Every step pinches the full density matrix with the two-cell
/// sign-of-total-spin family and diagonalizes; this is the oracle the
/// structured curve in [`OrbitReport`] is checked against.
pub fn entropy_trace(params: &AvalancheParams) -> Result<Vec<TracePoint>, AvalancheError> {
    let n = params.n_sites;
    if n > DENSE_CAP_SITES {
        return Err(AvalancheError::DimensionCap { n_sites: n, cap_sites: DENSE_CAP_SITES });
    }
    let dim = 1usize << n;
    let labels: Vec<f64> = (0..dim)
        .map(|c| if total_spin(c, n) > 0 { 1.0 } else { -1.0 })
        .collect();
    let cells = ProjectorFamily::from_diagonal_labels(&labels)?;
    let mut amps = CVector::zeros(dim);
    amps[0] = params.c_plus;
    amps[minus_seed(n)] = params.c_minus;
    let mut psi = PureState::new(amps)?;
    let mut out = Vec::with_capacity(params.steps + 1);
    for step in 0..=params.steps {
        let rho = DensityMatrix::from_pure(&psi);
        out.push(TracePoint {
            step,
            s_qb: entropy::quantum_boltzmann_entropy(&rho, &cells)?,
            s_vn: entropy::von_neumann_entropy(&rho),
        });
        if step < params.steps {
            psi = avalanche_step(&psi, params)?;
        }
    }
    Ok(out)
}
