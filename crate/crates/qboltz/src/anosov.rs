//! Dilation-flow wave-packet model with closed-form evolution.
//!
//! A two-level system couples to a hyperbolically unstable degree of freedom
//! whose conditional dynamics drags one branch by the dilation group. The
//! branch overlap that controls the off-diagonal of the reduced two-level
//! matrix is `(phi, e^{isK} phi)` with `K = p - x`, and `e^{isK}` acts in
//! closed form as a translation by `s` together with a pointwise phase
//! `e^{-isx}` and a global phase `e^{is^2/2}`. No unbounded operator is ever
//! represented as a matrix.
//!
//! - [`WavePacket`]: a sampled, normalized, compactly supported packet.
//! - [`translation_magnitude`]: the displacement `s(t) = 2 mu (1 - e^{-lambda
//!   t}) / lambda` accumulated by time `t`.
//! - [`overlap`]: trapezoid quadrature of the dragged-branch overlap.
//! - [`support_clearing_time`]: exact first time the displacement separates
//!   the branch supports, with a "never" branch.
//! - [`decoherence_time_case_a`] / [`decoherence_time_case_b`]: the closed
//!   thresholds `a1, t01, a2, t02`, always reported next to the exact
//!   support-clearing time because their geometric factors differ.
//! - [`classical_flow_check`] / [`weyl_commutator_check`]: exactness checks
//!   for the underlying flow algebra on points and on sampled packets.

use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{CMatrix, DensityMatrix, StateError};

/// Default number of samples for the built-in bump packet.
pub const DEFAULT_PACKET_POINTS: usize = 512;

/// Minimum grid resolution (points per unit length) accepted by quadratures.
pub const MIN_POINTS_PER_UNIT: f64 = 16.0;

/// Deviation from unit quadrature norm accepted by [`WavePacket::new`].
pub const PACKET_NORM_TOL: f64 = 1e-8;

/// Errors from the dilation-flow model.
#[derive(Debug, Error)]
pub enum AnosovError {
    /// A model constant is outside its admissible range.
    #[error("parameter `{name}` is out of range: {value}")]
    BadParameter { name: &'static str, value: f64 },
    /// Branch amplitudes must satisfy `|c_plus|^2 + |c_minus|^2 = 1`.
    #[error("amplitude norms sum to {norm_sq}, expected 1")]
    BadAmplitudes { norm_sq: f64 },
    /// The second-branch constants were not supplied.
    #[error("second-branch constants (re_lambda2, alpha_p2, t0) are required")]
    MissingCaseB,
    /// A packet needs enough samples for quadrature and differencing.
    #[error("packet grid must hold at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    /// Packet grids must be uniformly spaced ascending position samples.
    #[error("packet grid is not uniformly spaced")]
    NonUniformGrid,
    /// Packets must have unit quadrature norm.
    #[error("packet quadrature norm is {norm}, expected 1 within {PACKET_NORM_TOL}")]
    Unnormalized { norm: f64 },
    /// Packet values must vanish outside the declared support.
    #[error("packet value at x = {position} lies outside the support radius {support_radius}")]
    SupportLeak { position: f64, support_radius: f64 },
    /// The grid is too coarse for the requested quadrature.
    #[error("grid supplies {points_per_unit:.2} points per unit length, need {MIN_POINTS_PER_UNIT}")]
    GridTooCoarse { points_per_unit: f64 },
    /// State-level validation failure.
    #[error(transparent)]
    State(#[from] StateError),
}

/// Constants of the second decoherence branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseB {
    /// Real part of the growth exponent, must be positive.
    pub re_lambda2: f64,
    /// Momentum weight in the dilation generator, must be nonzero.
    pub alpha_p2: f64,
    /// Onset time added to the threshold, must be nonnegative.
    pub t0: f64,
}

/// Flow rate, coupling, packet support, and optional second-branch constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnosovParams {
    /// Flow rate `lambda` (nonzero; positive means contracting displacement).
    pub lyapunov: f64,
    /// Coupling strength `mu` (positive).
    pub coupling: f64,
    /// Support radius `S0` of the wave packet (positive).
    pub support_radius: f64,
    /// Constants of the second decoherence branch, when applicable.
    pub case_b: Option<CaseB>,
}

impl AnosovParams {
    /// Validates the flow rate, coupling, and support radius.
    pub fn new(lyapunov: f64, coupling: f64, support_radius: f64) -> Result<Self, AnosovError> {
        if !lyapunov.is_finite() || lyapunov == 0.0 {
            return Err(AnosovError::BadParameter { name: "lyapunov", value: lyapunov });
        }
        if !coupling.is_finite() || coupling <= 0.0 {
            return Err(AnosovError::BadParameter { name: "coupling", value: coupling });
        }
        if !support_radius.is_finite() || support_radius <= 0.0 {
            return Err(AnosovError::BadParameter { name: "support_radius", value: support_radius });
        }
        Ok(Self { lyapunov, coupling, support_radius, case_b: None })
    }

    /// Attaches validated second-branch constants.
    pub fn with_case_b(mut self, case_b: CaseB) -> Result<Self, AnosovError> {
        if !case_b.re_lambda2.is_finite() || case_b.re_lambda2 <= 0.0 {
            return Err(AnosovError::BadParameter { name: "re_lambda2", value: case_b.re_lambda2 });
        }
        if !case_b.alpha_p2.is_finite() || case_b.alpha_p2 == 0.0 {
            return Err(AnosovError::BadParameter { name: "alpha_p2", value: case_b.alpha_p2 });
        }
        if !case_b.t0.is_finite() || case_b.t0 < 0.0 {
            return Err(AnosovError::BadParameter { name: "t0", value: case_b.t0 });
        }
        self.case_b = Some(case_b);
        Ok(self)
    }
}

/// Hyperbolic phase-space flow `(x, p) -> (x cosh t + p sinh t, p cosh t + x
/// sinh t)` with unit expansion rate along the diagonal.
pub fn hyperbolic_flow(t: f64, point: (f64, f64)) -> (f64, f64) {
    let (x, p) = point;
    let (ch, sh) = (t.cosh(), t.sinh());
    (x * ch + p * sh, p * ch + x * sh)
}

/// Diagonal phase-space translation `(x, p) -> (x + s, p + s)`.
pub fn diagonal_translation(s: f64, point: (f64, f64)) -> (f64, f64) {
    (point.0 + s, point.1 + s)
}

/// Max component deviation between translating by `s` after the flow and
/// translating by the contracted amount `s e^{-lambda t}` before the flow.
///
/// The flow has unit expansion rate along the translation direction, so the
/// deviation vanishes identically exactly when `lambda = 1`; any other rate
/// leaves a mismatch growing like `|s| |1 - e^{(1-lambda) t}|`.
pub fn classical_flow_check(t: f64, s: f64, point: (f64, f64), lambda: f64) -> f64 {
    let after = diagonal_translation(s, hyperbolic_flow(t, point));
    let before = hyperbolic_flow(t, diagonal_translation(s * (-lambda * t).exp(), point));
    (after.0 - before.0).abs().max((after.1 - before.1).abs())
}

/// Displacement `s(t) = 2 mu (1 - e^{-lambda t}) / lambda` accumulated by the
/// dragged branch at time `t`.
///
/// Defined for `t >= 0`; negative times are admitted for asymmetry analysis.
/// For `lambda > 0` the displacement saturates at `2 mu / lambda`; for
/// `lambda < 0` it grows without bound.
pub fn translation_magnitude(t: f64, params: &AnosovParams) -> f64 {
    2.0 * params.coupling * (1.0 - (-params.lyapunov * t).exp()) / params.lyapunov
}

/// A sampled wave packet on a uniform position grid, compactly supported and
/// normalized under trapezoid quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    support_radius: f64,
}

/// Minimum number of samples accepted for a packet.
const MIN_PACKET_POINTS: usize = 4;

impl WavePacket {
    /// Validates grid uniformity, normalization, and compact support.
    pub fn new(
        grid: Vec<f64>,
        values: Vec<Complex64>,
        support_radius: f64,
    ) -> Result<Self, AnosovError> {
        if grid.len() < MIN_PACKET_POINTS || grid.len() != values.len() {
            return Err(AnosovError::TooFewPoints { got: grid.len().min(values.len()), min: MIN_PACKET_POINTS });
        }
        if !support_radius.is_finite() || support_radius <= 0.0 {
            return Err(AnosovError::BadParameter { name: "support_radius", value: support_radius });
        }
        let n = grid.len();
        let spacing = (grid[n - 1] - grid[0]) / (n - 1) as f64;
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(AnosovError::NonUniformGrid);
        }
        for i in 0..n - 1 {
            if ((grid[i + 1] - grid[i]) - spacing).abs() > 1e-8 * spacing.max(1.0) {
                return Err(AnosovError::NonUniformGrid);
            }
        }
        let bound = support_radius * (1.0 + 1e-12) + 1e-12;
        for (x, v) in grid.iter().zip(&values) {
            if x.abs() > bound && v.norm() > 1e-12 {
                return Err(AnosovError::SupportLeak { position: *x, support_radius });
            }
        }
        let packet = Self { grid, values, support_radius };
        let norm = packet.norm();
        if (norm - 1.0).abs() > PACKET_NORM_TOL {
            return Err(AnosovError::Unnormalized { norm });
        }
        Ok(packet)
    }

    /// Normalized `C^inf` bump `exp(-1 / (1 - (x/S0)^2))` truncated at
    /// `|x| = S0`, sampled at `n_points` uniform points on `[-S0, S0]`.
    pub fn bump(support_radius: f64, n_points: usize) -> Result<Self, AnosovError> {
        if !support_radius.is_finite() || support_radius <= 0.0 {
            return Err(AnosovError::BadParameter { name: "support_radius", value: support_radius });
        }
        if n_points < MIN_PACKET_POINTS {
            return Err(AnosovError::TooFewPoints { got: n_points, min: MIN_PACKET_POINTS });
        }
        let spacing = 2.0 * support_radius / (n_points - 1) as f64;
        let grid: Vec<f64> = (0..n_points).map(|i| -support_radius + i as f64 * spacing).collect();
        let mut values: Vec<Complex64> = grid
            .iter()
            .map(|x| {
                let u = x / support_radius;
                let shape = 1.0 - u * u;
                if shape > 0.0 {
                    Complex64::new((-1.0 / shape).exp(), 0.0)
                } else {
                    Complex64::ZERO
                }
            })
            .collect();
        let raw = Self { grid: grid.clone(), values: values.clone(), support_radius };
        let norm = raw.norm();
        for v in &mut values {
            *v /= norm;
        }
        Self::new(grid, values, support_radius)
    }

    /// Position samples of the packet.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Complex samples of the packet.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Declared support radius.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Grid spacing.
    pub fn spacing(&self) -> f64 {
        (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
    }

    /// Grid resolution in points per unit length.
    pub fn points_per_unit(&self) -> f64 {
        (self.grid.len() - 1) as f64 / (self.grid[self.grid.len() - 1] - self.grid[0])
    }

    /// Trapezoid quadrature norm of the samples.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect::<Vec<_>>(), self.spacing())
            .re
            .max(0.0)
            .sqrt()
    }

    /// Value at an arbitrary position: linear interpolation on the grid, zero
    /// outside it.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let n = self.grid.len();
        let (first, last) = (self.grid[0], self.grid[n - 1]);
        if x < first || x > last {
            return Complex64::ZERO;
        }
        let pos = (x - first) / self.spacing();
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    fn require_resolution(&self) -> Result<(), AnosovError> {
        let points_per_unit = self.points_per_unit();
        if points_per_unit < MIN_POINTS_PER_UNIT {
            return Err(AnosovError::GridTooCoarse { points_per_unit });
        }
        Ok(())
    }
}

/// Composite trapezoid sum `h * (f0/2 + f1 + ... + f_{n-2} + f_{n-1}/2)`.
fn trapezoid(samples: &[Complex64], spacing: f64) -> Complex64 {
    let n = samples.len();
    let mut sum = (samples[0] + samples[n - 1]) * 0.5;
    for v in &samples[1..n - 1] {
        sum += *v;
    }
    sum * spacing
}

/// Branch overlap `(phi, e^{isK} phi)` at time `t`, by trapezoid quadrature.
///
/// `e^{isK}` with `K = p - x` is applied in closed form: translate by
/// `s = translation_magnitude(t)`, multiply by the pointwise phase
/// `e^{-isx}`, and attach the global phase `e^{is^2/2}` fixed by the operator
/// splitting into position-phase and momentum-translation factors. Once `|s|`
/// exceeds twice the support radius the integrand vanishes identically and
/// the overlap is exactly zero.
pub fn overlap(t: f64, phi: &WavePacket, params: &AnosovParams) -> Result<Complex64, AnosovError> {
    phi.require_resolution()?;
    let s = translation_magnitude(t, params);
    let integrand: Vec<Complex64> = phi
        .grid
        .iter()
        .zip(&phi.values)
        .map(|(x, v)| v.conj() * Complex64::new(0.0, -s * x).exp() * phi.value_at(x + s))
        .collect();
    Ok(Complex64::new(0.0, s * s / 2.0).exp() * trapezoid(&integrand, phi.spacing()))
}

/// Time at which decoherence completes, or `Never`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoherenceTime {
    /// Decoherence completes at this time.
    At(f64),
    /// The displacement never separates the branch supports.
    Never,
}

impl DecoherenceTime {
    /// True for the `Never` branch.
    pub fn is_never(&self) -> bool {
        matches!(self, Self::Never)
    }

    /// The completion time, if any.
    pub fn time(&self) -> Option<f64> {
        match self {
            Self::At(t) => Some(*t),
            Self::Never => None,
        }
    }
}

/// Exact first time the displacement clears both supports, i.e. the root of
/// `s(t) = 2 S0`.
///
/// For `lambda > 0` the displacement saturates at `2 mu / lambda`, so the
/// root exists iff `S0 lambda / mu < 1`; otherwise `Never`. For `lambda < 0`
/// the displacement grows without bound and the root always exists.
pub fn support_clearing_time(params: &AnosovParams) -> DecoherenceTime {
    let (lambda, mu, s0) = (params.lyapunov, params.coupling, params.support_radius);
    if lambda > 0.0 {
        let remainder = 1.0 - s0 * lambda / mu;
        if remainder <= 0.0 {
            DecoherenceTime::Never
        } else {
            DecoherenceTime::At(-remainder.ln() / lambda)
        }
    } else {
        DecoherenceTime::At((1.0 + s0 * lambda.abs() / mu).ln() / lambda.abs())
    }
}

/// First-branch thresholds: the closed ratio `a1`, the nominal time `t01`,
/// and the exact support-clearing time, reported side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseAReport {
    /// Closed threshold ratio `a1 = S0 lambda / (4 mu)`.
    pub a1: f64,
    /// Nominal decoherence time `t01 = ln 2 / lambda`.
    pub t01: f64,
    /// Whether the closed condition `a1 < 1` holds.
    pub a1_below_one: bool,
    /// Exact first time the displacement clears both supports.
    pub oracle: DecoherenceTime,
}

/// Evaluates the first-branch thresholds next to the exact clearing time.
///
/// The closed ratio `a1` and nominal time `t01` carry a different geometric
/// factor than the exact root of `s(t) = 2 S0`; both are always reported so
/// downstream consumers never silently pick one. For `lambda < 0` the closed
/// forms are evaluated verbatim but the oracle (always finite there) is the
/// authoritative answer.
pub fn decoherence_time_case_a(params: &AnosovParams) -> CaseAReport {
    let a1 = params.support_radius * params.lyapunov / (4.0 * params.coupling);
    let t01 = std::f64::consts::LN_2 / params.lyapunov;
    CaseAReport { a1, t01, a1_below_one: a1 < 1.0, oracle: support_clearing_time(params) }
}

/// Second-branch thresholds evaluated exactly as closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseBReport {
    /// Closed threshold ratio `a2 = S0 Re(lambda2) e^{t0 Re(lambda2)} / (4 mu
    /// alpha_p2)`.
    pub a2: f64,
    /// Nominal decoherence time `t02 = t0 + ln 2 / Re(lambda2)`.
    pub t02: f64,
    /// `At(t02)` when `a2 < 1`, else `Never`.
    pub decoherence: DecoherenceTime,
}

/// Evaluates the second-branch thresholds; requires the case-b constants.
pub fn decoherence_time_case_b(params: &AnosovParams) -> Result<CaseBReport, AnosovError> {
    let case_b = params.case_b.ok_or(AnosovError::MissingCaseB)?;
    let a2 = params.support_radius * case_b.re_lambda2 * (case_b.t0 * case_b.re_lambda2).exp()
        / (4.0 * params.coupling * case_b.alpha_p2);
    let t02 = case_b.t0 + std::f64::consts::LN_2 / case_b.re_lambda2;
    let decoherence =
        if a2 < 1.0 { DecoherenceTime::At(t02) } else { DecoherenceTime::Never };
    Ok(CaseBReport { a2, t02, decoherence })
}

/// Quadrature-norm residual of the commutator identity
/// `[K, W] = (alpha_p beta - alpha_x gamma) W` applied to `phi`.
///
/// `K = alpha_x x + alpha_p p` acts with `p` as a centered first difference;
/// `W = e^{i(beta x + gamma p)}` acts as the phase-translation
/// `e^{-i beta gamma / 2} e^{i beta x} phi(x + gamma)`. The position part of
/// the residual cancels exactly on the grid; the momentum part leaves the
/// second-order stencil truncation, so the residual shrinks like the grid
/// spacing squared. `alpha` and `beta_gamma` are `(x-component, p-component)`
/// pairs.
pub fn weyl_commutator_check(
    alpha: (f64, f64),
    beta_gamma: (f64, f64),
    phi: &WavePacket,
) -> Result<f64, AnosovError> {
    phi.require_resolution()?;
    let (alpha_x, alpha_p) = alpha;
    let (beta, gamma) = beta_gamma;
    let n = phi.grid.len();
    let h = phi.spacing();

    let apply_w = |values: &[Complex64]| -> Vec<Complex64> {
        let shifted_packet =
            WavePacket { grid: phi.grid.clone(), values: values.to_vec(), support_radius: phi.support_radius };
        let central = Complex64::new(0.0, -beta * gamma / 2.0).exp();
        phi.grid
            .iter()
            .map(|x| central * Complex64::new(0.0, beta * x).exp() * shifted_packet.value_at(x + gamma))
            .collect()
    };
    let apply_k = |values: &[Complex64]| -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let left = if i == 0 { Complex64::ZERO } else { values[i - 1] };
                let right = if i + 1 == n { Complex64::ZERO } else { values[i + 1] };
                let derivative = (right - left) / (2.0 * h);
                values[i] * alpha_x * phi.grid[i] + Complex64::new(0.0, -alpha_p) * derivative
            })
            .collect()
    };

    let w_phi = apply_w(&phi.values);
    let k_w_phi = apply_k(&w_phi);
    let w_k_phi = apply_w(&apply_k(&phi.values));
    let factor = alpha_p * beta - alpha_x * gamma;
    let residual: Vec<Complex64> = (0..n)
        .map(|i| {
            let diff = k_w_phi[i] - w_k_phi[i] - w_phi[i] * factor;
            Complex64::new(diff.norm_sqr(), 0.0)
        })
        .collect();
    Ok(trapezoid(&residual, h).re.max(0.0).sqrt())
}

/// Reduced two-level matrix with off-diagonal `c_plus conj(c_minus) *
/// overlap`, validated as a density matrix.
///
/// Decoherence of the two-level system is equivalent to a vanishing overlap:
/// the off-diagonal is exactly the branch overlap scaled by the amplitude
/// product.
pub fn reduced_two_level(
    c_plus: Complex64,
    c_minus: Complex64,
    branch_overlap: Complex64,
) -> Result<DensityMatrix, AnosovError> {
    let norm_sq = c_plus.norm_sqr() + c_minus.norm_sqr();
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(AnosovError::BadAmplitudes { norm_sq });
    }
    let off = c_plus * c_minus.conj() * branch_overlap;
    let mat = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Complex64::new(c_plus.norm_sqr(), 0.0),
        (0, 1) => off,
        (1, 0) => off.conj(),
        _ => Complex64::new(c_minus.norm_sqr(), 0.0),
    });
    Ok(DensityMatrix::new(mat)?)
}
