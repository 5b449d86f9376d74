use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use resonance_atlas::continuation::{linear_grid, resonance_pair, track_many, TrackOptions};
use resonance_atlas::discrete::{discretized_matrix, matrix_eigenvalues};
use resonance_atlas::rootfind::NewtonOptions;
use resonance_atlas::{
    critical_coupling, eval_f_plus, eval_f_plus_contour, find_all, newton, CouplingFamily,
    EvalOptions, SeedStrategy, Vary,
};
use resonance_atlas_bench::{narrow, near_atomic};

fn resolvent(c: &mut Criterion) {
    let (p, family) = narrow();
    let opts = EvalOptions::default();
    let below = Complex64::new(1.0, -0.004);
    c.bench_function("eval_f_plus/jump", |b| {
        b.iter(|| eval_f_plus(&p, &family, black_box(near_atomic()), &opts).unwrap())
    });
    c.bench_function("eval_f_plus/contour", |b| {
        b.iter(|| eval_f_plus_contour(&p, &family, black_box(below), &opts).unwrap())
    });
}

fn roots(c: &mut Criterion) {
    let (p, family) = narrow();
    let opts = EvalOptions::default();
    let nopts = NewtonOptions::default();
    c.bench_function("newton/atomic", |b| {
        b.iter(|| {
            newton(
                &p,
                &family,
                black_box(Complex64::new(1.28, 0.0)),
                &nopts,
                &opts,
            )
            .unwrap()
        })
    });
    c.bench_function("find_all/narrow", |b| {
        b.iter(|| find_all(&p, &family, &SeedStrategy::default(), &opts).unwrap())
    });
}

fn continuation(c: &mut Criterion) {
    let (p, family) = narrow();
    let opts = EvalOptions::default();
    let seeds = resonance_pair(&p, &family, &opts).unwrap();
    let grid = linear_grid(0.01, 1.0, 100);
    let topts = TrackOptions::default();
    c.bench_function("track_many/mu_100_steps", |b| {
        b.iter(|| track_many(&p, &family, Vary::Mu, &grid, &seeds, &topts, &opts))
    });
    let lor = CouplingFamily::lorentzian_squared();
    c.bench_function("critical_coupling/mu_0.01", |b| {
        b.iter(|| critical_coupling(black_box(0.01), &lor, None, &opts).unwrap())
    });
}

fn discrete(c: &mut Criterion) {
    let m = discretized_matrix(0.1, 0.01, 0.02);
    c.bench_function("matrix_eigenvalues", |b| {
        b.iter(|| matrix_eigenvalues(black_box(&m)))
    });
}

criterion_group!(benches, resolvent, roots, continuation, discrete);
criterion_main!(benches);
