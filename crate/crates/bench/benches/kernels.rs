use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

use divcorr_core::moment::{correlation_integral, MomentParams};
use divcorr_core::{divisor_summatory, tau_segment, zeta};

fn bench_divisor_summatory(c: &mut Criterion) {
    let mut g = c.benchmark_group("divisor_summatory");
    for x in [1_000_000u64, 100_000_000] {
        g.bench_function(format!("x={x:e}"), |b| {
            b.iter(|| divisor_summatory(black_box(x)))
        });
    }
    g.finish();
}

fn bench_tau_segment(c: &mut Criterion) {
    let mut g = c.benchmark_group("tau_segment");
    for (lo, hi) in [(1u64, 1u64 << 20), (100_000_000, 100_000_000 + (1 << 20))] {
        g.throughput(Throughput::Elements(hi - lo + 1));
        g.bench_function(format!("[{lo}, {hi}]"), |b| {
            b.iter(|| tau_segment(black_box(lo), black_box(hi)).unwrap())
        });
    }
    g.finish();
}

fn bench_zeta(c: &mut Criterion) {
    c.bench_function("zeta(1.5)", |b| b.iter(|| zeta(black_box(1.5)).unwrap()));
}

fn bench_correlation(c: &mut Criterion) {
    let mut g = c.benchmark_group("correlation_integral");
    g.sample_size(10);
    for x in [1e5f64, 1e6] {
        g.bench_function(format!("(1,2) to {x:e}"), |b| {
            b.iter(|| {
                let params = MomentParams::new(vec![x]).unwrap();
                correlation_integral(black_box(1), black_box(2), &params).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_divisor_summatory,
    bench_tau_segment,
    bench_zeta,
    bench_correlation
);
criterion_main!(benches);
