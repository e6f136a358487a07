use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mnseries::coeff::int;
use mnseries::identities::{self, DysonInstance};
use mnseries::kernel::{self, WeightedTerm};
use mnseries::{ExponentVector, OrderKey};

/// Dense bivariate block `sum c x^i y^j`, sorted by weight `i + 8j`.
fn block(size: i64, salt: i64) -> Vec<WeightedTerm> {
    let mut out: Vec<WeightedTerm> = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .map(|(i, j)| WeightedTerm {
            weight: i + 8 * j,
            key: OrderKey(vec![i, j]),
            exp: ExponentVector(vec![i, j]),
            coeff: int((i * 31 + j * 17 + salt) % 23 - 11),
        })
        .collect();
    out.sort_by_key(|t| t.weight);
    out
}

fn convolution(c: &mut Criterion) {
    let (a, b) = (block(32, 1), block(32, 5));
    let bound = 31 * 9;
    let mut g = c.benchmark_group("convolve");
    g.bench_function("sequential", |bench| bench.iter(|| kernel::convolve_sequential(black_box(&a), black_box(&b), bound)));
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |bench| bench.iter(|| kernel::convolve_parallel(black_box(&a), black_box(&b), bound)));
    g.finish();
}

fn dyson_sweep(c: &mut Criterion) {
    let instances: Vec<DysonInstance> = identities::exponent_vectors(4, 3, 6)
        .into_iter()
        .map(|a| DysonInstance { a, generalized: false })
        .collect();
    let mut g = c.benchmark_group("dyson_sweep");
    g.sample_size(10);
    g.bench_function("sequential", |bench| bench.iter(|| identities::dyson_sweep_sequential(black_box(&instances))));
    g.bench_function("default", |bench| bench.iter(|| identities::dyson_sweep(black_box(&instances))));
    g.finish();
}

criterion_group!(benches, convolution, dyson_sweep);
criterion_main!(benches);
