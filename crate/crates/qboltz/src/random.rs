//! Seeded random states, unitaries, projector families, and channels.
//!
//! All generators take a caller-supplied RNG so that every randomized suite
//! is reproducible from a single seed.

use nalgebra::QR;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::qstate::{
    pinch, CMatrix, CVector, DensityMatrix, KrausMap, ProjectorFamily, PureState, UnitaryMap,
};

fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random pure state: normalized complex Gaussian vector.
pub fn random_pure_state<R: Rng>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Hilbert-Schmidt random density matrix `G G^dag / Tr`.
pub fn random_density_matrix<R: Rng>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).expect("Gaussian Gram matrix is a valid state")
}

/// Haar-random unitary: QR of a Ginibre matrix with the R-diagonal phases
/// folded back in.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> UnitaryMap {
    let qr = QR::new(ginibre(rng, dim, dim));
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d.unscale(d.norm()) } else { Complex64::ONE };
        for i in 0..dim {
            u[(i, k)] *= phase;
        }
    }
    UnitaryMap::new(u).expect("phase-fixed QR factor is unitary")
}

/// Random complete orthogonal family: a random basis partition into `cells`
/// nonempty groups, conjugated by one Haar-random unitary.
pub fn random_projector_family<R: Rng>(rng: &mut R, dim: usize, cells: usize) -> ProjectorFamily {
    assert!(cells >= 1 && cells <= dim, "need 1 <= cells <= dim");
    // random composition of dim into `cells` positive parts
    let mut cuts: Vec<usize> = Vec::with_capacity(cells + 1);
    cuts.push(0);
    while cuts.len() < cells {
        let c = rng.random_range(1..dim);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.push(dim);
    cuts.sort_unstable();
    let u = random_unitary(rng, dim);
    let um = u.matrix();
    let projectors: Vec<CMatrix> = cuts
        .windows(2)
        .map(|w| {
            let mut p = CMatrix::zeros(dim, dim);
            for k in w[0]..w[1] {
                let col = um.column(k);
                for i in 0..dim {
                    for j in 0..dim {
                        p[(i, j)] += col[i] * col[j].conj();
                    }
                }
            }
            p
        })
        .collect();
    let labels = (0..cells).map(|k| k as f64).collect();
    ProjectorFamily::new(projectors, labels).expect("conjugated basis partition is a valid family")
}

/// Random state that is exactly decoherent for `cells`: the pinch of a
/// Hilbert-Schmidt random state.
pub fn random_decoherent_state<R: Rng>(rng: &mut R, cells: &ProjectorFamily) -> DensityMatrix {
    let rho = random_density_matrix(rng, cells.dim());
    pinch(&rho, cells).expect("pinch of a valid state is valid")
}

/// Random trace-preserving Kraus map with `n_ops` operators, from a Haar
/// random isometry split into row blocks.
pub fn random_kraus_map<R: Rng>(rng: &mut R, dim: usize, n_ops: usize) -> KrausMap {
    assert!(n_ops >= 1, "need at least one Kraus operator");
    let tall = ginibre(rng, dim * n_ops, dim);
    let qr = QR::new(tall);
    let q = qr.q(); // (dim * n_ops) x dim isometry
    let ops: Vec<CMatrix> = (0..n_ops)
        .map(|b| {
            CMatrix::from_fn(dim, dim, |i, j| q[(b * dim + i, j)])
        })
        .collect();
    KrausMap::new(ops).expect("row blocks of an isometry are trace preserving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 3, 4, 8] {
            let _psi = random_pure_state(&mut rng, dim);
            let _rho = random_density_matrix(&mut rng, dim);
            let _u = random_unitary(&mut rng, dim);
            let _k = random_kraus_map(&mut rng, dim, 3);
            let cells = 2.min(dim);
            let fam = random_projector_family(&mut rng, dim, cells);
            assert_eq!(fam.len(), cells);
            let dec = random_decoherent_state(&mut rng, &fam);
            assert!(crate::qstate::is_decoherent(&dec, &fam, 1e-11));
        }
    }

    #[test]
    fn same_seed_reproduces_states() {
        let a = random_density_matrix(&mut ChaCha8Rng::seed_from_u64(11), 4);
        let b = random_density_matrix(&mut ChaCha8Rng::seed_from_u64(11), 4);
        assert_eq!(a.matrix(), b.matrix(), "seeded generation must be deterministic");
    }

    #[test]
    fn projector_family_spans_requested_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = random_projector_family(&mut rng, 8, 3);
        let total_rank: f64 = (0..fam.len()).map(|a| fam.projector(a).trace().re).sum();
        assert!((total_rank - 8.0).abs() <= 1e-9, "cell ranks must sum to dim");
    }
}
