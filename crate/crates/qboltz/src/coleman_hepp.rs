//! Exactly solvable spin-chain measurement model (Coleman-Hepp type).
//!
//! A system qubit is measured by a chain of `N = 2L + 1` apparatus spins: at
//! step `t -> t + 1` the spin at site `t + 1` is flipped iff the qubit is
//! down, so a flip front sweeps the chain and copies the qubit label into the
//! macroscopic polarization. Phase cells are the two eigenspaces of the sign
//! of the total chain polarization (`N` odd, so zero never occurs).
//!
//! Two engines cover every observable of interest:
//! - a structured engine that tracks the branch decomposition of the state
//!   and evaluates entropies and cross elements by exact combinatorics,
//! - a dense oracle ([`DenseEngine`]) that multiplies out the step unitaries
//!   on the full `2^(N+1)`-dimensional space.
//!
//! Conventions: the system qubit is tensor factor 0 (slowest index), chain
//! site `s` (1-based) is bit `N - s` of a configuration word, and a set bit
//! means spin down, so the all-up configuration is `0`. The conditional flip
//! carries a factor `-i` per flipped site; it is tracked as a global phase on
//! the minus amplitude so that the two engines agree amplitude-by-amplitude.

use num_complex::Complex64;
use thiserror::Error;

use crate::entropy::{self, EntropyError};
use crate::par;
use crate::qstate::{tensor, CMatrix, DensityMatrix, ProjectorFamily, StateError};

/// Largest half-length for which dense `2^(N+1)`-dimensional objects are built.
pub const DEFAULT_DENSE_CAP: usize = 5;

/// Largest half-length for which the structured engine enumerates all `2^N`
/// chain configurations of a thermal initial state.
pub const ENUMERATION_CAP: usize = 8;

/// Amplitude products at or below this magnitude count as degenerate.
const AMPLITUDE_FLOOR: f64 = 1e-15;

/// Errors from the spin-chain measurement model.
#[derive(Debug, Error)]
pub enum ChainError {
    /// Amplitudes must satisfy `|c_plus|^2 + |c_minus|^2 = 1`.
    #[error("amplitude norms sum to {norm_sq}, expected 1")]
    BadAmplitudes { norm_sq: f64 },
    /// The chain polarization sign must be +1 or -1.
    #[error("polarization sign must be +1 or -1, got {sign}")]
    BadSign { sign: i8 },
    /// The coupling `beta * B` must be a nonnegative real (infinity allowed).
    #[error("coupling beta*B must be nonnegative, got {beta_b}")]
    BadCoupling { beta_b: f64 },
    /// The flip front has already reached the end of the chain.
    #[error("cannot step past the chain end: t = {time_step}, N = {n_sites}")]
    StepPastEnd { time_step: usize, n_sites: usize },
    /// The requested chain is too large for the chosen representation.
    #[error("chain of {n_sites} sites exceeds the cap of {cap_sites} sites")]
    DimensionCap { n_sites: usize, cap_sites: usize },
    /// Both amplitudes must be nonzero for a measurement to resolve anything.
    #[error("c_plus * c_minus is numerically zero; the entropy jump degenerates")]
    DegenerateAmplitudes,
    /// Observables must act on the qubit plus a leading stretch of the chain.
    #[error("observable of dimension {dim} does not fit a qubit plus a prefix of {n_sites} sites")]
    BadObservable { dim: usize, n_sites: usize },
    /// State-level validation failure.
    #[error(transparent)]
    State(#[from] StateError),
    /// Entropy-level failure.
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// Model parameters: chain size, qubit amplitudes, and chain preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Half-length `L`; the chain has `N = 2L + 1` sites.
    pub half_length: usize,
    /// Amplitude of the qubit-up branch.
    pub c_plus: Complex64,
    /// Amplitude of the qubit-down branch.
    pub c_minus: Complex64,
    /// Product `beta * B` of inverse temperature and field; `inf` selects the
    /// fully polarized chain.
    pub beta_b: f64,
    /// Sign of the initial chain polarization (+1 mostly up, -1 mostly down).
    pub sign: i8,
}

impl ChainParams {
    /// Validates amplitudes, coupling, and sign.
    pub fn new(
        half_length: usize,
        c_plus: Complex64,
        c_minus: Complex64,
        beta_b: f64,
        sign: i8,
    ) -> Result<Self, ChainError> {
        let norm_sq = c_plus.norm_sqr() + c_minus.norm_sqr();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(ChainError::BadAmplitudes { norm_sq });
        }
        if sign != 1 && sign != -1 {
            return Err(ChainError::BadSign { sign });
        }
        if beta_b.is_nan() || beta_b < 0.0 {
            return Err(ChainError::BadCoupling { beta_b });
        }
        Ok(Self { half_length, c_plus, c_minus, beta_b, sign })
    }

    /// Balanced qubit (`c_plus = c_minus = 1/sqrt 2`) over an up-polarized chain.
    pub fn balanced(half_length: usize, beta_b: f64) -> Self {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(half_length, c, c, beta_b, 1).expect("balanced amplitudes are normalized")
    }

    /// Number of chain sites `N = 2L + 1`.
    pub fn n_sites(&self) -> usize {
        2 * self.half_length + 1
    }

    /// Probability that a single chain spin points up in the initial ensemble.
    pub fn p_up(&self) -> f64 {
        if self.beta_b.is_infinite() {
            if self.sign > 0 { 1.0 } else { 0.0 }
        } else {
            (1.0 + f64::from(self.sign) * self.beta_b.tanh()) / 2.0
        }
    }
}

/// Bit mask of the first `time_step` sites (the stretch the flip front has passed).
pub fn flip_mask(n_sites: usize, time_step: usize) -> usize {
    debug_assert!(time_step <= n_sites);
    ((1usize << time_step) - 1) << (n_sites - time_step)
}

/// Total chain polarization (number of up spins minus down spins).
pub fn polarization(config: usize, n_sites: usize) -> i64 {
    n_sites as i64 - 2 * i64::from(config.count_ones())
}

/// Whether chain site `site` (1-based) points up in `config`.
pub fn site_is_up(config: usize, n_sites: usize, site: usize) -> bool {
    debug_assert!((1..=n_sites).contains(&site));
    (config >> (n_sites - site)) & 1 == 0
}

/// One weighted branch of the structured state.
///
/// The branch vector is `amp_plus |up> (x) |config>` plus
/// `amp_minus |down> (x) |config with the first t sites flipped>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// Chain configuration of the qubit-up component.
    pub config: usize,
    /// Classical ensemble weight of this branch.
    pub weight: f64,
    /// Amplitude of the qubit-up component.
    pub amp_plus: Complex64,
    /// Amplitude of the qubit-down component, including the flip phases.
    pub amp_minus: Complex64,
}

/// Branch decomposition of the evolving chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredChainState {
    params: ChainParams,
    time_step: usize,
    branches: Vec<Branch>,
}

impl StructuredChainState {
    /// Product initial state: qubit superposition times the chain ensemble.
    ///
    /// For finite coupling every one of the `2^N` chain configurations is
    /// enumerated with its product weight, so the chain size is capped at
    /// [`ENUMERATION_CAP`]; the fully polarized (infinite-coupling) chain is a
    /// single branch at any size.
    pub fn initial_state(params: &ChainParams) -> Result<Self, ChainError> {
        let n = params.n_sites();
        let branches = if params.beta_b.is_infinite() {
            let config = if params.sign > 0 { 0 } else { (1usize << n) - 1 };
            vec![Branch { config, weight: 1.0, amp_plus: params.c_plus, amp_minus: params.c_minus }]
        } else {
            if params.half_length > ENUMERATION_CAP {
                return Err(ChainError::DimensionCap {
                    n_sites: n,
                    cap_sites: 2 * ENUMERATION_CAP + 1,
                });
            }
            let p = params.p_up();
            let q = 1.0 - p;
            (0..1usize << n)
                .map(|config| {
                    let downs = config.count_ones() as i32;
                    Branch {
                        config,
                        weight: p.powi(n as i32 - downs) * q.powi(downs),
                        amp_plus: params.c_plus,
                        amp_minus: params.c_minus,
                    }
                })
                .collect()
        };
        Ok(Self { params: *params, time_step: 0, branches })
    }

    /// Initial state advanced by `time_step` flips.
    pub fn evolve_to(params: &ChainParams, time_step: usize) -> Result<Self, ChainError> {
        let mut state = Self::initial_state(params)?;
        for _ in 0..time_step {
            state = state.step()?;
        }
        Ok(state)
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    /// Position of the flip front.
    pub fn time_step(&self) -> usize {
        self.time_step
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Chain configuration of the qubit-down component of `branch`.
    pub fn minus_config(&self, branch: &Branch) -> usize {
        branch.config ^ flip_mask(self.params.n_sites(), self.time_step)
    }

    /// Advances the flip front by one site.
    ///
    /// The minus-branch configuration picks up the next flip (implicit in
    /// [`Self::minus_config`]) and the minus amplitude the accompanying `-i`.
    pub fn step(&self) -> Result<Self, ChainError> {
        let n = self.params.n_sites();
        if self.time_step >= n {
            return Err(ChainError::StepPastEnd { time_step: self.time_step, n_sites: n });
        }
        let branches = self
            .branches
            .iter()
            .map(|b| Branch { amp_minus: b.amp_minus * Complex64::new(0.0, -1.0), ..*b })
            .collect();
        Ok(Self { params: self.params, time_step: self.time_step + 1, branches })
    }

    /// Total weight `sum w (|amp_plus|^2 + |amp_minus|^2)`; one for a valid state.
    pub fn weight_normalization(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.weight * (b.amp_plus.norm_sqr() + b.amp_minus.norm_sqr()))
            .sum()
    }

    /// Dense density matrix of the current state (cap [`DEFAULT_DENSE_CAP`]).
    pub fn density_matrix(&self) -> Result<DensityMatrix, ChainError> {
        self.density_matrix_with_cap(DEFAULT_DENSE_CAP)
    }

    /// Dense density matrix `sum_I w_I |psi_I><psi_I|` with an explicit cap.
    ///
    /// Each branch vector has exactly two nonzero components, so assembly
    /// costs `O(2^N)` even though the matrix is `2^(N+1)` dimensional.
    pub fn density_matrix_with_cap(&self, cap_half_length: usize) -> Result<DensityMatrix, ChainError> {
        let n = self.params.n_sites();
        if self.params.half_length > cap_half_length {
            return Err(ChainError::DimensionCap { n_sites: n, cap_sites: 2 * cap_half_length + 1 });
        }
        let dim = 1usize << (n + 1);
        let down_block = 1usize << n;
        let mut mat = CMatrix::zeros(dim, dim);
        for branch in &self.branches {
            let i_plus = branch.config;
            let i_minus = down_block | self.minus_config(branch);
            let w = branch.weight;
            mat[(i_plus, i_plus)] += branch.amp_plus * branch.amp_plus.conj() * w;
            mat[(i_plus, i_minus)] += branch.amp_plus * branch.amp_minus.conj() * w;
            mat[(i_minus, i_plus)] += branch.amp_minus * branch.amp_plus.conj() * w;
            mat[(i_minus, i_minus)] += branch.amp_minus * branch.amp_minus.conj() * w;
        }
        Ok(DensityMatrix::trusted(mat))
    }
}

/// Exact binomial coefficient as a float (exact for every size used here).
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc as f64
}

/// Total and heaviest product weight of the configurations whose polarization
/// sign flips when the first `time_step` sites are inverted.
///
/// Configurations are counted by `k_front` up spins among the first
/// `time_step` sites and `k_rest` among the remainder; inverting the front
/// turns `k_front` into `time_step - k_front`.
fn split_weights(n_sites: usize, time_step: usize, p_up: f64) -> (f64, f64) {
    let q = 1.0 - p_up;
    let n = n_sites as i64;
    let mut total = 0.0;
    let mut heaviest = 0.0f64;
    for k_front in 0..=time_step {
        for k_rest in 0..=(n_sites - time_step) {
            let k_up = k_front + k_rest;
            let k_up_flipped = (time_step - k_front) + k_rest;
            let pol = 2 * k_up as i64 - n;
            let pol_flipped = 2 * k_up_flipped as i64 - n;
            if pol * pol_flipped < 0 {
                let config_weight = p_up.powi(k_up as i32) * q.powi((n_sites - k_up) as i32);
                total += binomial(time_step, k_front) * binomial(n_sites - time_step, k_rest) * config_weight;
                heaviest = heaviest.max(config_weight);
            }
        }
    }
    (total, heaviest)
}

/// Entropy and cross-term diagnostics along the full sweep `t = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    /// Von Neumann entropy of the state (constant under the unitary sweep).
    pub s_vn: f64,
    /// Coarse-grained entropy at each front position.
    pub s_qb: Vec<f64>,
    /// Largest cross-cell matrix entry magnitude at each front position.
    pub witness: Vec<f64>,
}

/// Coarse-grained entropy sweep, evaluated by exact combinatorics.
///
/// The pinched state splits into a thermal background plus a two-label
/// mixture on the sign-split configurations, giving
/// `S_QB(t) = N h(p) + h(|c_plus|^2) W_split(t)` with `W_split` the total
/// weight of configurations whose polarization sign flips with the front.
/// The witness curve is `|c_plus c_minus|` times the heaviest split weight.
pub fn qb_entropy_curve(params: &ChainParams) -> EntropyCurve {
    let n = params.n_sites();
    let p = params.p_up();
    let base = n as f64 * entropy::shannon([p, 1.0 - p]);
    let label_entropy = entropy::shannon([params.c_plus.norm_sqr(), params.c_minus.norm_sqr()]);
    let cross_scale = params.c_plus.norm() * params.c_minus.norm();
    let points = par::map_indexed(n + 1, |t| {
        let (split_mass, heaviest) = split_weights(n, t, p);
        (base + label_entropy * split_mass, cross_scale * heaviest)
    });
    let (s_qb, witness) = points.into_iter().unzip();
    EntropyCurve { s_vn: base, s_qb, witness }
}

/// Coarse-grained entropy gained over the full sweep, `S_QB(N) - S_QB(0)`.
///
/// Positive whenever both amplitudes are nonzero: the full flip inverts every
/// polarization sign, so the final split weight is the whole ensemble and the
/// jump equals the label entropy `h(|c_plus|^2)` at every coupling.
pub fn entropy_jump(params: &ChainParams) -> Result<f64, ChainError> {
    if (params.c_plus * params.c_minus).norm() <= AMPLITUDE_FLOOR {
        return Err(ChainError::DegenerateAmplitudes);
    }
    let n = params.n_sites();
    let p = params.p_up();
    let (split_end, _) = split_weights(n, n, p);
    let (split_start, _) = split_weights(n, 0, p);
    let label_entropy = entropy::shannon([params.c_plus.norm_sqr(), params.c_minus.norm_sqr()]);
    Ok(label_entropy * (split_end - split_start))
}

/// Minority masses of the two polarized ensembles, by exact binomial sums.
///
/// `m_plus` is the weight the up-polarized ensemble puts on majority-down
/// configurations, `m_minus` the converse; both depend only on the coupling.
/// The two sums are evaluated independently even though they agree by the
/// up-down symmetry of the binomial weights.
pub fn cross_term_mass(params: &ChainParams) -> (f64, f64) {
    if params.beta_b.is_infinite() {
        return (0.0, 0.0);
    }
    let n = params.n_sites();
    let l = params.half_length;
    let p = (1.0 + params.beta_b.tanh()) / 2.0;
    let q = 1.0 - p;
    let m_plus: f64 = (0..=l)
        .map(|k| binomial(n, k) * p.powi(k as i32) * q.powi((n - k) as i32))
        .sum();
    let m_minus: f64 = (l + 1..=n)
        .map(|k| binomial(n, k) * q.powi(k as i32) * p.powi((n - k) as i32))
        .sum();
    (m_plus, m_minus)
}

/// First time after which observables on the qubit plus the first
/// `support_sites` sites have vanishing cross elements, `t0 = M + 1 - w + r`.
///
/// `w` and `r` are the packet half-widths before and after scattering; the
/// simplest convention sets them equal, leaving `t0 = M + 1`.
pub fn decoherence_time(support_sites: u32, w: f64, r: f64) -> f64 {
    debug_assert!(support_sites >= 1);
    f64::from(support_sites) + 1.0 - w + r
}

/// Cross matrix element of an observable between the two qubit sectors.
///
/// The observable acts on the qubit (slow factor) plus the first `m` chain
/// sites, where its dimension is `2^(m+1)`; the returned value is
/// `Tr[Q_minus rho(t) Q_plus A]` with `Q_plusminus` the qubit projectors.
/// Once the flip front passes the observable's support (`t > m`), the
/// branch configurations differ outside that support and every cross element
/// vanishes identically.
pub fn offdiag_overlap(
    params: &ChainParams,
    time_step: usize,
    observable: &CMatrix,
) -> Result<Complex64, ChainError> {
    let n = params.n_sites();
    let dim = observable.nrows();
    if observable.ncols() != dim || dim < 2 || !dim.is_power_of_two() || (dim.trailing_zeros() as usize) > n + 1 {
        return Err(ChainError::BadObservable { dim, n_sites: n });
    }
    let support_sites = dim.trailing_zeros() as usize - 1;
    let state = StructuredChainState::evolve_to(params, time_step)?;
    let rest = n - support_sites;
    let rest_mask = (1usize << rest) - 1;
    let mask = flip_mask(n, time_step);
    if mask & rest_mask != 0 {
        return Ok(Complex64::ZERO);
    }
    let qubit_down = 1usize << support_sites;
    let mut total = Complex64::ZERO;
    for branch in state.branches() {
        let row = branch.config >> rest;
        let col = qubit_down | ((branch.config ^ mask) >> rest);
        total += branch.amp_minus * branch.amp_plus.conj() * observable[(row, col)] * branch.weight;
    }
    Ok(total)
}

/// Global spin-flip string `X (x) X (x) ... (x) X` on the qubit and every site.
///
/// Unlike any local observable, its cross element at the end of the sweep has
/// magnitude `|c_plus c_minus|`: it undoes the recorded measurement.
pub fn undoing_operator(half_length: usize) -> CMatrix {
    let dim = 1usize << (2 * half_length + 2);
    CMatrix::from_fn(dim, dim, |i, j| {
        if i ^ j == dim - 1 { Complex64::ONE } else { Complex64::ZERO }
    })
}

/// Deviation of the pointer reading from ideal after the full sweep.
///
/// Conditioned on the positive phase cell at `t = N`, the system polarization
/// should read +1; minority configurations contaminate the cell and shift the
/// conditional expectation to
/// `(w_plus (1 - m) - w_minus m) / (w_plus (1 - m) + w_minus m)` with
/// `m` the minority mass and `w_plusminus` the qubit branch weights. The
/// returned value is the distance to the ideal reading, which therefore
/// decays at the same exponential rate as the minority mass itself.
pub fn conditional_expectation_deviation(params: &ChainParams) -> f64 {
    let (m_plus, _) = cross_term_mass(params);
    if m_plus == 0.0 {
        return 0.0;
    }
    let w_plus = params.c_plus.norm_sqr();
    let w_minus = params.c_minus.norm_sqr();
    2.0 * w_minus * m_plus / (w_plus * (1.0 - m_plus) + w_minus * m_plus)
}

/// Two-cell family splitting the full space by the sign of the chain
/// polarization, identity on the qubit; cell 0 carries the positive sign.
///
/// Dense construction and validation cost grows as the cube of `2^(N+1)`, so
/// this is meant for oracle-scale chains.
pub fn phase_cells(half_length: usize) -> Result<ProjectorFamily, ChainError> {
    let n = 2 * half_length + 1;
    let dim = 1usize << (n + 1);
    let chain_mask = (1usize << n) - 1;
    let labels: Vec<f64> = (0..dim)
        .map(|idx| if polarization(idx & chain_mask, n) > 0 { 1.0 } else { -1.0 })
        .collect();
    Ok(ProjectorFamily::from_diagonal_labels(&labels)?)
}

/// Dense oracle: multiplies out the step unitaries on the full space.
#[derive(Debug, Clone)]
pub struct DenseEngine {
    params: ChainParams,
    time_step: usize,
    rho: CMatrix,
}

impl DenseEngine {
    /// Dense initial state under the default cap.
    pub fn new(params: &ChainParams) -> Result<Self, ChainError> {
        Self::with_cap(params, DEFAULT_DENSE_CAP)
    }

    /// Dense initial state `|qubit><qubit| (x) site^(x N)` with an explicit cap.
    pub fn with_cap(params: &ChainParams, cap_half_length: usize) -> Result<Self, ChainError> {
        let n = params.n_sites();
        if params.half_length > cap_half_length {
            return Err(ChainError::DimensionCap { n_sites: n, cap_sites: 2 * cap_half_length + 1 });
        }
        let amps = [params.c_plus, params.c_minus];
        let qubit = CMatrix::from_fn(2, 2, |i, j| amps[i] * amps[j].conj());
        let p = params.p_up();
        let site = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(p, 0.0),
            Complex64::new(1.0 - p, 0.0),
        ]));
        let mut rho = qubit;
        for _ in 0..n {
            rho = tensor(&rho, &site);
        }
        Ok(Self { params: *params, time_step: 0, rho })
    }

    /// Unitary for the step `t -> t + 1`: identity on the qubit-up sector,
    /// `-i X` at site `t + 1` on the qubit-down sector.
    pub fn step_unitary(&self, time_step: usize) -> CMatrix {
        let n = self.params.n_sites();
        let minus_i_x = CMatrix::from_fn(2, 2, |i, j| {
            if i != j { Complex64::new(0.0, -1.0) } else { Complex64::ZERO }
        });
        let flip = tensor(
            &tensor(&CMatrix::identity(1 << time_step, 1 << time_step), &minus_i_x),
            &CMatrix::identity(1 << (n - time_step - 1), 1 << (n - time_step - 1)),
        );
        let up = CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 { Complex64::ONE } else { Complex64::ZERO }
        });
        let down = CMatrix::from_fn(2, 2, |i, j| {
            if i == 1 && j == 1 { Complex64::ONE } else { Complex64::ZERO }
        });
        tensor(&up, &CMatrix::identity(1 << n, 1 << n)) + tensor(&down, &flip)
    }

    /// Conjugates the state by the next step unitary.
    pub fn step(&mut self) -> Result<(), ChainError> {
        let n = self.params.n_sites();
        if self.time_step >= n {
            return Err(ChainError::StepPastEnd { time_step: self.time_step, n_sites: n });
        }
        let u = self.step_unitary(self.time_step);
        self.rho = &u * &self.rho * u.adjoint();
        self.time_step += 1;
        Ok(())
    }

    /// Position of the flip front.
    pub fn time_step(&self) -> usize {
        self.time_step
    }

    /// Raw state matrix.
    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// Current state as a density matrix.
    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::trusted(self.rho.clone())
    }
}

/// Entropy sweep recomputed densely: pinch, diagonalize, and measure cross
/// terms at every front position. Serves as the oracle for
/// [`qb_entropy_curve`] on small chains.
pub fn dense_entropy_curve(
    params: &ChainParams,
    cap_half_length: usize,
) -> Result<EntropyCurve, ChainError> {
    let mut engine = DenseEngine::with_cap(params, cap_half_length)?;
    let cells = phase_cells(params.half_length)?;
    let n = params.n_sites();
    let s_vn = entropy::von_neumann_entropy(&engine.density_matrix());
    let mut s_qb = Vec::with_capacity(n + 1);
    let mut witness = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let rho = engine.density_matrix();
        s_qb.push(entropy::quantum_boltzmann_entropy(&rho, &cells)?);
        witness.push(entropy::equality_witness(&rho, &cells)?);
        if t < n {
            engine.step()?;
        }
    }
    Ok(EntropyCurve { s_vn, s_qb, witness })
}
