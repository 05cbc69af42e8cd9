//! Cross-checks the closed-form trace-norm distance between pure states
//! against an independent oracle: the sum of singular values of the explicit
//! projector difference.

use num_complex::Complex64;
use qboltz::qstate::{trace_norm_pure_diff, CVector, DensityMatrix, PureState};
use qboltz::random::random_pure_state;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

const PAIRS: usize = 200;
const TOL: f64 = 1e-10;

/// Trace norm of `|psi1><psi1| - |psi2><psi2|` from the singular values of
/// the difference matrix, with no use of the overlap shortcut.
fn svd_trace_norm(psi1: &PureState, psi2: &PureState) -> f64 {
    let diff = DensityMatrix::from_pure(psi1).matrix() - DensityMatrix::from_pure(psi2).matrix();
    diff.svd(false, false).singular_values.iter().sum()
}

#[test]
fn closed_form_matches_svd_on_random_pairs() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x0721_0a11);
    let mut worst = 0.0f64;
    for k in 0..PAIRS {
        let dim = 2 + k % 15;
        let psi1 = random_pure_state(&mut rng, dim);
        let psi2 = random_pure_state(&mut rng, dim);
        let closed = trace_norm_pure_diff(&psi1, &psi2);
        let oracle = svd_trace_norm(&psi1, &psi2);
        let dev = (closed - oracle).abs();
        worst = worst.max(dev);
        assert!(dev <= TOL, "pair {k} (dim {dim}): closed {closed} vs svd {oracle}");
    }
    eprintln!("trace-norm closed form vs SVD: worst deviation {worst:.3e} over {PAIRS} pairs");
}

#[test]
fn identical_states_up_to_phase_have_zero_distance() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x0721_0a12);
    let psi = random_pure_state(&mut rng, 5);
    let phase = Complex64::from_polar(1.0, 1.234);
    let rotated = PureState::new(psi.amplitudes().map(|a| a * phase)).expect("unit norm");
    assert!(trace_norm_pure_diff(&psi, &rotated) <= 1e-7, "global phase must not separate states");
    assert!(svd_trace_norm(&psi, &rotated) <= 1e-7);
}

#[test]
fn orthogonal_states_sit_at_maximal_distance() {
    let e0 = PureState::new(CVector::from_fn(4, |i, _| {
        if i == 0 { Complex64::ONE } else { Complex64::ZERO }
    }))
    .expect("unit norm");
    let e2 = PureState::new(CVector::from_fn(4, |i, _| {
        if i == 2 { Complex64::ONE } else { Complex64::ZERO }
    }))
    .expect("unit norm");
    let closed = trace_norm_pure_diff(&e0, &e2);
    assert!((closed - 2.0).abs() <= 1e-12, "orthogonal pure states must be at distance 2");
    assert!((svd_trace_norm(&e0, &e2) - 2.0).abs() <= 1e-12);
}
