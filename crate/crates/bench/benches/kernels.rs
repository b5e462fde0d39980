use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relweyl::mollify::{gaussian_field, ConvolutionRule, MollifierKernel};
use relweyl::semiclassics::classical_trace;
use relweyl::spectral::{relative_trace, trace_neg, TraceOptions};
use relweyl::theory::{eta_report, zone_ledger, LedgerOptions};
use relweyl::{Dimension, QuadratureSpec};
use relweyl_bench::{default_pair, grid, hydrogen, shared_grid};

fn bench_trace_neg(c: &mut Criterion) {
    let v = hydrogen();
    let options = TraceOptions::default();
    let mut group = c.benchmark_group("trace_neg");
    group.sample_size(10);
    for h in [0.2, 0.1] {
        let g = grid(&v, h);
        group.bench_with_input(BenchmarkId::from_parameter(h), &h, |b, &h| {
            b.iter(|| trace_neg(&v, h, &g, &options).unwrap())
        });
    }
    group.finish();
}

fn bench_relative_trace(c: &mut Criterion) {
    let pair = default_pair();
    let options = TraceOptions::default();
    let h = 0.1;
    let g = shared_grid(&pair, h);
    let mut group = c.benchmark_group("relative_trace");
    group.sample_size(10);
    group.bench_function("h=0.1", |b| {
        b.iter(|| relative_trace(&pair, h, &g, &options).unwrap())
    });
    group.finish();
}

fn bench_classical(c: &mut Criterion) {
    let v = hydrogen();
    let quad = QuadratureSpec::default();
    c.bench_function("classical_trace", |b| {
        b.iter(|| classical_trace(&v, 0.1, &quad).unwrap())
    });
}

fn bench_convolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolve");
    for d in [Dimension::Two, Dimension::Three] {
        let rule = ConvolutionRule::new(&MollifierKernel::new(d, 1.0).unwrap());
        let field = gaussian_field();
        let x = vec![0.3; d.as_u32() as usize];
        group.bench_with_input(BenchmarkId::from_parameter(d), &x, |b, x| {
            b.iter(|| rule.convolve(&field, 0.05, x).unwrap())
        });
    }
    group.finish();
}

fn bench_exponents(c: &mut Criterion) {
    c.bench_function("eta_report", |b| {
        b.iter(|| eta_report(Dimension::Three, 1.3, 2.0, 0.5).unwrap())
    });
    let options = LedgerOptions::default();
    c.bench_function("zone_ledger", |b| {
        b.iter(|| zone_ledger(Dimension::Three, 1.3, 2.0, 0.5, 0.3, &options).unwrap())
    });
}

criterion_group!(
    benches,
    bench_trace_neg,
    bench_relative_trace,
    bench_classical,
    bench_convolve,
    bench_exponents
);
criterion_main!(benches);
