//! Compares the data-parallel indexed map against its sequential fallback on
//! the two workloads that dominate the randomized suites: full second-law
//! trials and Gram-row trace products.
//!
//! With the default `parallel` feature the first route fans out over rayon;
//! rebuilding with `--no-default-features` makes both routes sequential, which
//! is the point of the comparison.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qboltz::entropy::second_law_gap;
use qboltz::par::{map_indexed, map_indexed_serial};
use qboltz::qstate::{trace_product, CMatrix};
use qboltz::random::{random_decoherent_state, random_projector_family, random_unitary};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

const TRIALS: usize = 16;
const DIM: usize = 8;

/// One full second-law trial: family, decoherent state, unitary, gap.
fn second_law_trial(index: usize) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(0xbe4c_0000 + index as u64);
    let cells = random_projector_family(&mut rng, DIM, 2 + index % (DIM - 1));
    let rho = random_decoherent_state(&mut rng, &cells);
    let u = random_unitary(&mut rng, DIM);
    second_law_gap(&rho, &u, &cells).expect("valid trial").gap
}

fn bench_second_law_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("second_law_trials");
    group.sample_size(10);
    group.bench_function("map_indexed", |b| {
        b.iter(|| black_box(map_indexed(TRIALS, second_law_trial)))
    });
    group.bench_function("map_indexed_serial", |b| {
        b.iter(|| black_box(map_indexed_serial(TRIALS, second_law_trial)))
    });
    group.finish();
}

fn bench_gram_rows(c: &mut Criterion) {
    let mut rng = ChaCha12Rng::seed_from_u64(0xbe4c_1111);
    let chains: Vec<CMatrix> = (0..64)
        .map(|_| random_unitary(&mut rng, 16).matrix().clone())
        .collect();
    let total = chains.len();
    let entry = |flat: usize| {
        let (row, col) = (flat / total, flat % total);
        trace_product(&chains[row], &chains[col].adjoint())
    };

    let mut group = c.benchmark_group("gram_entries");
    group.sample_size(10);
    group.bench_function("map_indexed", |b| {
        b.iter(|| black_box(map_indexed(total * total, entry)))
    });
    group.bench_function("map_indexed_serial", |b| {
        b.iter(|| black_box(map_indexed_serial(total * total, entry)))
    });
    group.finish();
}

criterion_group!(benches, bench_second_law_trials, bench_gram_rows);
criterion_main!(benches);
