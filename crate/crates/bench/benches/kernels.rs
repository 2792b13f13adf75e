use std::hint::black_box;

use bqp_bench::{grid, rough_field, simulation};
use bqp_core::lp::{besov_norm, paraproduct_pair, BesovSpec, DyadicFilterBank};
use bqp_core::spectral::{biot_savart, product};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral");
    for n in [64, 128, 256] {
        let g = grid(n);
        let w = rough_field(&g, 1);
        let v = rough_field(&g, 2);
        group.bench_with_input(BenchmarkId::new("biot_savart", n), &w, |b, w| b.iter(|| biot_savart(black_box(w))));
        group.bench_with_input(BenchmarkId::new("product", n), &(w.clone(), v), |b, (w, v)| {
            b.iter(|| product(black_box(w), black_box(v)))
        });
    }
    group.finish();
}

fn littlewood_paley(c: &mut Criterion) {
    let mut group = c.benchmark_group("lp");
    for n in [64, 128, 256] {
        let g = grid(n);
        let bank = DyadicFilterBank::new(&g);
        let u = rough_field(&g, 3);
        let v = rough_field(&g, 4);
        group.bench_with_input(BenchmarkId::new("decompose", n), &u, |b, u| b.iter(|| bank.decompose(black_box(u)).unwrap()));
        let spec = BesovSpec::new(-0.5, f64::INFINITY, f64::INFINITY).unwrap();
        group.bench_with_input(BenchmarkId::new("besov_holder", n), &u, |b, u| {
            b.iter(|| besov_norm(&bank, black_box(u), spec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bony_split", n), &(u.clone(), v), |b, (u, v)| {
            b.iter(|| paraproduct_pair(&bank, black_box(u), black_box(v)).unwrap())
        });
    }
    group.finish();
}

fn stepper(c: &mut Criterion) {
    let mut group = c.benchmark_group("ifrk2_step");
    group.sample_size(10);
    for n in [64, 128] {
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter_batched(
                || simulation(n),
                |mut sim| sim.advance(f64::INFINITY).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, spectral, littlewood_paley, stepper);
criterion_main!(benches);
