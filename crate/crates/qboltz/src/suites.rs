//! Seeded randomized invariant suites shared by the CLI and the acceptance
//! tests.
//!
//! Every trial draws from its own RNG stream derived from the master seed,
//! the suite name, and the trial index, so reports are identical whatever
//! the worker count and rows always come out in a fixed order.
//!
//! - [`second_law_suite`]: coarse-grained entropy never drops under unitary
//!   evolution from a cell-diagonal start, over randomized
//!   (state, unitary, family) triples.
//! - [`relative_entropy_suite`]: the five relative-entropy facts
//!   (nonnegativity, vanishing iff equal, the dominated bound, joint
//!   convexity, monotonicity under pinching / partial trace / channels) over
//!   randomized instances.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::entropy::{relative_entropy, second_law_gap, EntropyError};
use crate::par;
use crate::qstate::{
    max_entry_norm, partial_trace, pinch, DensityMatrix, StateError,
};
use crate::random::{
    random_decoherent_state, random_density_matrix, random_kraus_map, random_projector_family,
    random_unitary,
};

/// Most negative coarse-grained entropy gap accepted by the suite.
pub const SECOND_LAW_GAP_TOL: f64 = 1e-9;

/// Largest inequality excess accepted by the relative-entropy suite.
pub const LEMMA_TOL: f64 = 1e-9;

/// Errors from suite configuration.
#[derive(Debug, Error)]
pub enum SuiteError {
    /// At least one dimension and one trial are required.
    #[error("suite needs at least one dimension and one trial")]
    EmptyConfig,
    /// Dimensions must admit a nontrivial cell split (and stay affordable).
    #[error("dimension {dim} is outside the supported range 2..=64")]
    BadDimension { dim: usize },
    /// The relative-entropy suite factors its space as 2 x (dim/2).
    #[error("relative-entropy suite needs an even dimension >= 4, got {dim}")]
    OddDimension { dim: usize },
    /// Entropy-level failure.
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    /// State-level failure.
    #[error(transparent)]
    State(#[from] StateError),
}

/// Splitmix-style finalizer deriving one trial seed from master seed, stream
/// tag, and trial index.
fn trial_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Configuration of the randomized second-law suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondLawConfig {
    /// Hilbert-space dimensions to draw triples in.
    pub dims: Vec<usize>,
    /// Independent triples per dimension.
    pub trials_per_dim: usize,
    /// Master seed for all trials.
    pub seed: u64,
}

impl SecondLawConfig {
    /// The pinned acceptance workload: 1000 triples in each of dims 4, 8, 16.
    pub fn acceptance(seed: u64) -> Self {
        Self { dims: vec![4, 8, 16], trials_per_dim: 1000, seed }
    }
}

/// One randomized (cell-diagonal state, unitary, family) triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondLawTrial {
    /// Hilbert-space dimension.
    pub dim: usize,
    /// Trial index within the dimension.
    pub trial: usize,
    /// Number of cells in the random projector family.
    pub cells: usize,
    /// Coarse-grained entropy of the initial cell-diagonal state.
    pub s_qb_initial: f64,
    /// Coarse-grained entropy after the unitary step.
    pub s_qb_final: f64,
    /// Entropy gap `s_qb_final - s_qb_initial`.
    pub gap: f64,
}

/// All second-law trials plus the summary extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondLawReport {
    /// Every trial, ordered by (dimension, trial index).
    pub trials: Vec<SecondLawTrial>,
    /// Most negative gap observed.
    pub min_gap: f64,
    /// Number of trials with gap below `-SECOND_LAW_GAP_TOL`.
    pub violations: usize,
}

/// Runs the randomized second-law suite: pinch a random state to make it
/// cell-diagonal, evolve by a random unitary, and report the coarse-grained
/// entropy gap for every triple.
pub fn second_law_suite(config: &SecondLawConfig) -> Result<SecondLawReport, SuiteError> {
    if config.dims.is_empty() || config.trials_per_dim == 0 {
        return Err(SuiteError::EmptyConfig);
    }
    for &dim in &config.dims {
        if !(2..=64).contains(&dim) {
            return Err(SuiteError::BadDimension { dim });
        }
    }
    let mut trials = Vec::with_capacity(config.dims.len() * config.trials_per_dim);
    for &dim in &config.dims {
        let batch: Vec<Result<SecondLawTrial, SuiteError>> =
            par::map_indexed(config.trials_per_dim, |index| {
                let seed = trial_seed(config.seed, 0x5EC0_0D1A ^ dim as u64, index as u64);
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let cells = rng.random_range(2..=dim);
                let family = random_projector_family(&mut rng, dim, cells);
                let rho0 = random_decoherent_state(&mut rng, &family);
                let u = random_unitary(&mut rng, dim);
                let report = second_law_gap(&rho0, &u, &family)?;
                Ok(SecondLawTrial {
                    dim,
                    trial: index,
                    cells,
                    s_qb_initial: report.s_qb - report.gap,
                    s_qb_final: report.s_qb,
                    gap: report.gap,
                })
            });
        for item in batch {
            trials.push(item?);
        }
    }
    let min_gap = trials.iter().map(|t| t.gap).fold(f64::INFINITY, f64::min);
    let violations = trials.iter().filter(|t| t.gap < -SECOND_LAW_GAP_TOL).count();
    Ok(SecondLawReport { trials, min_gap, violations })
}

/// Configuration of the relative-entropy lemma suite.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeEntropyConfig {
    /// Hilbert-space dimension (even, so the space factors as 2 x dim/2).
    pub dim: usize,
    /// Independent trials per lemma part.
    pub trials_per_part: usize,
    /// Master seed for all trials.
    pub seed: u64,
}

impl RelativeEntropyConfig {
    /// The pinned acceptance workload: 500 trials per part in dimension 8.
    pub fn acceptance(seed: u64) -> Self {
        Self { dim: 8, trials_per_part: 500, seed }
    }
}

/// Per-part outcome: every trial's inequality excess, worst first.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaPart {
    /// Stable part name (also the CSV key).
    pub name: &'static str,
    /// Per-trial excess beyond the exact inequality, in trial order.
    pub excesses: Vec<f64>,
    /// Largest excess observed.
    pub worst_excess: f64,
}

/// All five lemma parts in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeEntropyReport {
    /// Parts in order: nonnegativity, zero-iff-equal, dominated-bound,
    /// joint-convexity, monotonicity.
    pub parts: Vec<LemmaPart>,
    /// Largest excess across all parts.
    pub worst_excess: f64,
}

fn part_over(
    name: &'static str,
    trials: usize,
    excess_of: impl Fn(&mut ChaCha12Rng) -> f64 + Sync + Send,
    master: u64,
    stream: u64,
) -> LemmaPart {
    let excesses = par::map_indexed(trials, |index| {
        let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(master, stream, index as u64));
        excess_of(&mut rng)
    });
    let worst_excess = excesses.iter().copied().fold(0.0, f64::max);
    LemmaPart { name, excesses, worst_excess }
}

/// Runs the five-part relative-entropy suite and reports every inequality
/// excess (positive means the exact inequality was violated by that much).
pub fn relative_entropy_suite(
    config: &RelativeEntropyConfig,
) -> Result<RelativeEntropyReport, SuiteError> {
    if config.trials_per_part == 0 {
        return Err(SuiteError::EmptyConfig);
    }
    let dim = config.dim;
    if dim < 4 || dim % 2 != 0 {
        return Err(SuiteError::OddDimension { dim });
    }
    if dim > 64 {
        return Err(SuiteError::BadDimension { dim });
    }
    let trials = config.trials_per_part;
    let seed = config.seed;

    let nonnegativity = part_over(
        "nonnegativity",
        trials,
        |rng| {
            let rho1 = random_density_matrix(rng, dim);
            // Every fifth pair pits a full-rank state against a pure one so
            // the support-violation branch (+infinity) is exercised too.
            let divergence = if rng.random_range(0..5) == 0 {
                let psi = crate::random::random_pure_state(rng, dim);
                relative_entropy(&rho1, &DensityMatrix::from_pure(&psi))
            } else {
                relative_entropy(&rho1, &random_density_matrix(rng, dim))
            };
            (-divergence).max(0.0)
        },
        seed,
        0x4C31,
    );

    let zero_iff_equal = part_over(
        "zero_iff_equal",
        trials,
        |rng| {
            let rho1 = random_density_matrix(rng, dim);
            let rho2 = random_density_matrix(rng, dim);
            let self_divergence = relative_entropy(&rho1, &rho1).abs();
            let cross = relative_entropy(&rho1, &rho2);
            let distance = max_entry_norm(&(rho1.matrix() - rho2.matrix()));
            // A vanishing divergence must certify equal matrices.
            let converse = if cross <= LEMMA_TOL && distance > 1e-9 { distance } else { 0.0 };
            self_divergence.max(converse)
        },
        seed,
        0x4C32,
    );

    let dominated_bound = part_over(
        "dominated_bound",
        trials,
        |rng| {
            let rho1 = random_density_matrix(rng, dim);
            let sigma = random_density_matrix(rng, dim);
            let lambda: f64 = rng.random_range(0.05..0.95);
            let mix = DensityMatrix::new(
                rho1.matrix() * Complex64::from(lambda)
                    + sigma.matrix() * Complex64::from(1.0 - lambda),
            )
            .expect("convex combination of states is a state");
            (relative_entropy(&rho1, &mix) - (-lambda.ln())).max(0.0)
        },
        seed,
        0x4C33,
    );

    let joint_convexity = part_over(
        "joint_convexity",
        trials,
        |rng| {
            let rho1 = random_density_matrix(rng, dim);
            let sigma1 = random_density_matrix(rng, dim);
            let rho2 = random_density_matrix(rng, dim);
            let sigma2 = random_density_matrix(rng, dim);
            let d1 = relative_entropy(&rho1, &sigma1);
            let d2 = relative_entropy(&rho2, &sigma2);
            let mut worst: f64 = 0.0;
            for step in 1..=9 {
                let lambda = f64::from(step) / 10.0;
                let mix = |a: &DensityMatrix, b: &DensityMatrix| {
                    DensityMatrix::new(
                        a.matrix() * Complex64::from(lambda)
                            + b.matrix() * Complex64::from(1.0 - lambda),
                    )
                    .expect("convex combination of states is a state")
                };
                let lhs = relative_entropy(&mix(&rho1, &rho2), &mix(&sigma1, &sigma2));
                let rhs = lambda * d1 + (1.0 - lambda) * d2;
                worst = worst.max(lhs - rhs);
            }
            worst.max(0.0)
        },
        seed,
        0x4C34,
    );

    let monotonicity = part_over(
        "monotonicity",
        trials,
        |rng| {
            let rho1 = random_density_matrix(rng, dim);
            let rho2 = random_density_matrix(rng, dim);
            let before = relative_entropy(&rho1, &rho2);
            let mut worst: f64 = 0.0;

            let cells = rng.random_range(2..=dim);
            let family = random_projector_family(rng, dim, cells);
            let pinched = relative_entropy(
                &pinch(&rho1, &family).expect("matching dims"),
                &pinch(&rho2, &family).expect("matching dims"),
            );
            worst = worst.max(pinched - before);

            let factors = [2, dim / 2];
            let reduced = relative_entropy(
                &partial_trace(&rho1, &factors, &[1]).expect("valid factorization"),
                &partial_trace(&rho2, &factors, &[1]).expect("valid factorization"),
            );
            worst = worst.max(reduced - before);

            let channel = random_kraus_map(rng, dim, 3);
            let mapped = relative_entropy(
                &channel.apply(&rho1).expect("matching dims"),
                &channel.apply(&rho2).expect("matching dims"),
            );
            worst = worst.max(mapped - before);

            worst.max(0.0)
        },
        seed,
        0x4C35,
    );

    let parts = vec![nonnegativity, zero_iff_equal, dominated_bound, joint_convexity, monotonicity];
    let worst_excess = parts.iter().map(|p| p.worst_excess).fold(0.0, f64::max);
    Ok(RelativeEntropyReport { parts, worst_excess })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_law_suite_small_run_has_no_violations() {
        let config = SecondLawConfig { dims: vec![4, 8], trials_per_dim: 50, seed: 17 };
        let report = second_law_suite(&config).expect("suite runs");
        assert_eq!(report.trials.len(), 100);
        assert_eq!(report.violations, 0, "min gap {}", report.min_gap);
        assert!(report.min_gap >= -SECOND_LAW_GAP_TOL);
        assert!(
            report.trials.iter().any(|t| t.gap > 1e-3),
            "random unitaries should typically raise the coarse-grained entropy"
        );
    }

    #[test]
    fn second_law_suite_is_deterministic() {
        let config = SecondLawConfig { dims: vec![4], trials_per_dim: 20, seed: 99 };
        let a = second_law_suite(&config).expect("suite runs");
        let b = second_law_suite(&config).expect("suite runs");
        assert_eq!(a, b, "same seed must reproduce every trial");
        let other = second_law_suite(&SecondLawConfig { seed: 100, ..config }).expect("suite runs");
        assert!(
            a.trials.iter().zip(&other.trials).any(|(x, y)| x.gap != y.gap),
            "different seeds must change the draws"
        );
    }

    #[test]
    fn second_law_suite_rejects_bad_configs() {
        assert!(matches!(
            second_law_suite(&SecondLawConfig { dims: vec![], trials_per_dim: 5, seed: 0 }),
            Err(SuiteError::EmptyConfig)
        ));
        assert!(matches!(
            second_law_suite(&SecondLawConfig { dims: vec![4], trials_per_dim: 0, seed: 0 }),
            Err(SuiteError::EmptyConfig)
        ));
        assert!(matches!(
            second_law_suite(&SecondLawConfig { dims: vec![1], trials_per_dim: 5, seed: 0 }),
            Err(SuiteError::BadDimension { dim: 1 })
        ));
    }

    #[test]
    fn relative_entropy_suite_small_run_stays_within_tolerance() {
        let config = RelativeEntropyConfig { dim: 4, trials_per_part: 40, seed: 23 };
        let report = relative_entropy_suite(&config).expect("suite runs");
        assert_eq!(report.parts.len(), 5);
        let names: Vec<_> = report.parts.iter().map(|p| p.name).collect();
        assert_eq!(
            names,
            ["nonnegativity", "zero_iff_equal", "dominated_bound", "joint_convexity", "monotonicity"]
        );
        for part in &report.parts {
            assert_eq!(part.excesses.len(), 40);
            assert!(
                part.worst_excess <= LEMMA_TOL,
                "part {} worst excess {}",
                part.name,
                part.worst_excess
            );
        }
    }

    #[test]
    fn relative_entropy_suite_is_deterministic() {
        let config = RelativeEntropyConfig { dim: 4, trials_per_part: 15, seed: 5 };
        let a = relative_entropy_suite(&config).expect("suite runs");
        let b = relative_entropy_suite(&config).expect("suite runs");
        assert_eq!(a, b, "same seed must reproduce every excess");
    }

    #[test]
    fn relative_entropy_suite_rejects_bad_dimensions() {
        let odd = RelativeEntropyConfig { dim: 5, trials_per_part: 5, seed: 0 };
        assert!(matches!(relative_entropy_suite(&odd), Err(SuiteError::OddDimension { dim: 5 })));
        let tiny = RelativeEntropyConfig { dim: 2, trials_per_part: 5, seed: 0 };
        assert!(matches!(relative_entropy_suite(&tiny), Err(SuiteError::OddDimension { dim: 2 })));
    }
}
