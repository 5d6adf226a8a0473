use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sqg_core::initial::PowerLaw;
use sqg_core::littlewood_paley::{besov_norm, project_block};
use sqg_core::solver::{nonlinear_term, step, SolverConfig, SolverState};
use sqg_core::spectral::{apply_multiplier, forward_transform, inverse_transform};
use sqg_core::{GridSpec, MultiplierSpec, SpectralField};

fn data(n: usize) -> SpectralField {
    PowerLaw::new(2.0, 1.0, f64::INFINITY).sample(GridSpec::square(n).unwrap(), 1)
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform");
    for n in [64, 128, 256] {
        let f = data(n);
        let phys = inverse_transform(&f).unwrap();
        g.bench_with_input(BenchmarkId::new("inverse", n), &f, |b, f| {
            b.iter(|| inverse_transform(black_box(f)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("forward", n), &phys, |b, p| {
            b.iter(|| forward_transform(black_box(p), f.grid()).unwrap())
        });
    }
    g.finish();
}

fn multipliers(c: &mut Criterion) {
    let f = data(256);
    let mut g = c.benchmark_group("multiplier_256");
    g.bench_function("heat", |b| {
        b.iter(|| apply_multiplier(black_box(&f), &MultiplierSpec::heat(1.0, 0.1, 0.5)).unwrap())
    });
    g.bench_function("block", |b| b.iter(|| project_block(black_box(&f), 4)));
    g.bench_function("besov", |b| {
        b.iter(|| besov_norm(black_box(&f), 1.0, 2.0, 2.0).unwrap())
    });
    g.finish();
}

fn nonlinear(c: &mut Criterion) {
    let mut g = c.benchmark_group("nonlinear_term");
    for n in [64, 128, 256] {
        let f = data(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| nonlinear_term(black_box(f)).unwrap())
        });
    }
    g.finish();
}

fn stepping(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    g.sample_size(20);
    for n in [64, 128, 256] {
        let f = data(n);
        let f = f.scaled(1.0 / f.l2_norm());
        let cfg = SolverConfig::new(*f.grid(), 1.0, 0.5, 1e-3, 1.0);
        let state = SolverState::initial(f);
        g.bench_with_input(BenchmarkId::new("if_rk4", n), &state, |b, s| {
            b.iter(|| step(black_box(s), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, transforms, multipliers, nonlinear, stepping);
criterion_main!(benches);
