use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use demifield::checks::{CheckConfig, Theorem};
use demifield::fields::{sample_field, Dist, GeneratorSpec, Kernel, Model};
use demifield::funcs::OrliczSpec;
use demifield::lattice::LatticeBox;
use demifield::stats::{rank_order, upcross_total, UpcrossMode};

fn generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_field");
    for n in [8usize, 32, 128] {
        let iid = GeneratorSpec::iid(Dist::Normal, &[n, n]).unwrap();
        group.bench_with_input(BenchmarkId::new("iid_normal", n), &iid, |b, s| {
            b.iter(|| sample_field(black_box(s), 7).unwrap())
        });
        let kernel = Kernel::new(vec![2, 2], vec![1.0, 0.5, 0.5, 0.25]).unwrap();
        let ma = GeneratorSpec::new(
            Model::MovingAverage { kernel, dist: Dist::Normal },
            LatticeBox::from_dims(&[n, n]).unwrap(),
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::new("moving_average", n), &ma, |b, s| {
            b.iter(|| sample_field(black_box(s), 7).unwrap())
        });
    }
    group.finish();
}

fn statistics(c: &mut Criterion) {
    let field = sample_field(&GeneratorSpec::iid(Dist::Normal, &[64, 64]).unwrap(), 1).unwrap();
    c.bench_function("rank_order_64x64_j10", |b| b.iter(|| rank_order(black_box(&field), 10).unwrap()));
    c.bench_function("upcross_all_lines_64x64", |b| {
        b.iter(|| upcross_total(black_box(&field), -0.5, 0.5, UpcrossMode::AllLinesSum).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let phi = OrliczSpec::XLog1p;
    c.bench_function("big_phi_quadrature_xlog1p", |b| {
        b.iter(|| phi.big_phi_a_quadrature(black_box(0.5), black_box(10.0)).unwrap())
    });
}

fn checks(c: &mut Criterion) {
    let spec = GeneratorSpec::product(Dist::Lognormal { sigma: 0.3 }, 1.0, &[4, 4]).unwrap();
    let cfg = CheckConfig::new(spec, Theorem::CairoliMoment { p: 2.0 }).replicates(10_000).seed(1);
    let mut group = c.benchmark_group("checks");
    group.sample_size(10);
    group.bench_function("cairoli_moment_4x4_r1e4", |b| b.iter(|| cfg.run(0).unwrap()));
    group.finish();
}

criterion_group!(benches, generators, statistics, quadrature, checks);
criterion_main!(benches);
