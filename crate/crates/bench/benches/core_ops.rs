use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use unsharp_bench::{bench_povm, bench_state};
use unsharp_core::instruments::{sample_sequential, InstrumentKind};
use unsharp_core::measures::measure_report;
use unsharp_core::monotonicity::{dichotomic_grid_scan, sigma_report};
use unsharp_core::search::conjecture_scan;

fn bench_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    for d in [2, 4, 8] {
        let povm = bench_povm(2, d, 17);
        let effect = povm.effect(0).clone();
        group.bench_with_input(BenchmarkId::from_parameter(d), &effect, |b, h| {
            b.iter(|| black_box(h.eig().values[0]))
        });
    }
    group.finish();
}

fn bench_measures(c: &mut Criterion) {
    let povm = bench_povm(4, 3, 23);
    c.bench_function("measure_report_n4_d3", |b| {
        b.iter(|| black_box(measure_report(black_box(&povm))))
    });
    let qubit = bench_povm(3, 2, 29);
    c.bench_function("sigma_report_n3_d2", |b| {
        b.iter(|| black_box(sigma_report(black_box(&qubit))))
    });
}

fn bench_sampling(c: &mut Criterion) {
    let povm = bench_povm(3, 2, 31);
    let rho = bench_state(2, 37);
    c.bench_function("sample_sequential_10k", |b| {
        b.iter(|| {
            black_box(sample_sequential(&povm, &rho, InstrumentKind::Luder, 10_000, 5).unwrap())
        })
    });
}

fn bench_scans(c: &mut Criterion) {
    c.bench_function("grid_scan_101", |b| {
        b.iter(|| black_box(dichotomic_grid_scan(101).unwrap()))
    });
    c.bench_function("conjecture_scan_500", |b| {
        b.iter(|| black_box(conjecture_scan(&[3], 500, 7).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_eig,
    bench_measures,
    bench_sampling,
    bench_scans
);
criterion_main!(benches);
