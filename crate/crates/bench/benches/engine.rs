use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tilepump_bench::{column, corpus};
use tilepump_core::engine::{run_algorithm, RunLimits};
use tilepump_core::pumping::decide_pumping;
use tilepump_core::visibility::Side;
use tilepump_core::Assembly;

fn pumping(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide_pumping");
    for len in [16, 64, 256] {
        let f = column(len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &f, |b, f| {
            b.iter(|| decide_pumping(&f.tas, &f.path, 1, 3, &Assembly::empty()).unwrap())
        });
    }
    group.finish();
}

fn algorithm(c: &mut Criterion) {
    let f = column(64);
    let limits = RunLimits { check_invariants: false, ..RunLimits::bare(Side::West) };
    c.bench_function("run_algorithm/column64", |b| b.iter(|| run_algorithm(&f.tas, &f.path, 1, 2, &limits).unwrap()));
}

fn corpus_throughput(c: &mut Criterion) {
    let instances = corpus(7);
    let limits = RunLimits { fragility_fallback: None, check_invariants: false, ..RunLimits::bare(Side::West) };
    let mut group = c.benchmark_group("corpus");
    group.throughput(criterion::Throughput::Elements(instances.len() as u64));
    group.sample_size(10);
    group.bench_function("run_algorithm/len7", |b| {
        b.iter(|| {
            for (tas, path, i, j) in &instances {
                black_box(run_algorithm(tas, path, *i, *j, &limits).unwrap());
            }
        })
    });
    group.finish();
}

criterion_group!(benches, pumping, algorithm, corpus_throughput);
criterion_main!(benches);
