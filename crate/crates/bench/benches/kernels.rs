use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use saddlefocus::analysis::lyapunov;
use saddlefocus::map::step;
use saddlefocus::symbolic::{encode, lempel_ziv};
use saddlefocus::sweep::run_sweep;
use saddlefocus::{AxisSpec, Branch, FieldKind, FieldSpec, MapParams, Param, DEFAULT_ZERO_EPS};

fn chaotic() -> MapParams {
    MapParams::symmetric(0.5, 0.05, 10.0).unwrap()
}

fn map_step(c: &mut Criterion) {
    let p = chaotic();
    let mut g = c.benchmark_group("step");
    g.throughput(Throughput::Elements(1000));
    g.bench_function("orbit_1000", |b| {
        b.iter(|| {
            let mut x = black_box(0.05);
            for _ in 0..1000 {
                x = step(&p, x).unwrap();
            }
            x
        })
    });
    g.finish();
}

fn exponent(c: &mut Criterion) {
    let p = chaotic();
    c.bench_function("lyapunov_500_5000", |b| b.iter(|| lyapunov(&p, black_box(0.05), 500, 5000).unwrap()));
}

fn symbolic(c: &mut Criterion) {
    let p = chaotic();
    let mut g = c.benchmark_group("symbolic");
    for n in [64, 5000] {
        g.bench_with_input(BenchmarkId::new("encode", n), &n, |b, &n| {
            b.iter(|| encode(&p, Branch::Positive, n, DEFAULT_ZERO_EPS).unwrap())
        });
        let seq = encode(&p, Branch::Positive, n, DEFAULT_ZERO_EPS).unwrap();
        g.bench_with_input(BenchmarkId::new("lempel_ziv", n), &seq, |b, seq| b.iter(|| lempel_ziv(seq).unwrap()));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let x = AxisSpec::new(Param::Rho, 0.2, 1.5, 64).unwrap();
    let y = AxisSpec::new(Param::Mu, -0.3, 0.3, 64).unwrap();
    let mut g = c.benchmark_group("sweep_64x64");
    g.sample_size(10);
    for (name, kind) in [
        ("iterate_1", FieldKind::IterateValue(1)),
        ("embedding_64", FieldKind::SymbolEmbedding(64)),
        ("lyapunov_100_500", FieldKind::Lyapunov { transient: 100, samples: 500 }),
    ] {
        let field = FieldSpec::new(kind, chaotic());
        g.bench_function(name, |b| b.iter(|| run_sweep(x, y, field, 1).unwrap()));
    }
    g.finish();
}

criterion_group!(kernels, map_step, exponent, symbolic, sweep);
criterion_main!(kernels);
