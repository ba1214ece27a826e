use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jamsec_bench::{geometries, scenario};
use jamsec_core::analytic::{moment_closed_form, Moment};
use jamsec_core::los::{fit_report, FitOptions};
use jamsec_core::{ellint_e_inc, ellint_f, f_gamma2, scp, simulate_scp, Environment, LosMode, NoiseMode};

fn special_functions(c: &mut Criterion) {
    c.bench_function("ellint_f", |b| b.iter(|| ellint_f(black_box(1.1), black_box(0.7))));
    c.bench_function("ellint_e_inc", |b| b.iter(|| ellint_e_inc(black_box(1.1), black_box(0.7))));
}

fn moments(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment_closed_form");
    for (name, geom) in geometries() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &geom, |b, geom| {
            b.iter(|| moment_closed_form(black_box(geom), Moment::Cubic))
        });
    }
    g.finish();
}

fn cdf_and_scp(c: &mut Criterion) {
    let (cfg, los) = scenario(500.0);
    c.bench_function("f_gamma2", |b| b.iter(|| f_gamma2(black_box(3.0), &cfg, &los)));
    c.bench_function("scp", |b| b.iter(|| scp(black_box(&cfg), &los)));
}

fn simulation(c: &mut Criterion) {
    let (cfg, los) = scenario(500.0);
    let mut g = c.benchmark_group("simulate_scp");
    g.sample_size(10);
    g.bench_function("10k_trials", |b| {
        b.iter(|| simulate_scp(&cfg, &LosMode::Piecewise(los), 10_000, NoiseMode::WithNoise, black_box(1)))
    });
    g.finish();
}

fn fitting(c: &mut Criterion) {
    let mut g = c.benchmark_group("fit_los");
    g.sample_size(10);
    let env = Environment::urban();
    g.bench_function("urban", |b| b.iter(|| fit_report(black_box(&env), &FitOptions::default())));
    g.finish();
}

criterion_group!(benches, special_functions, moments, cdf_and_scp, simulation, fitting);
criterion_main!(benches);
