use criterion::{criterion_group, criterion_main, Criterion};
use fraktur_bench::Fixture;
use fraktur_core::check::derivative_checks;
use fraktur_core::model::{gradient, hessian_apply};
use fraktur_core::upper::{reduced_gradient, regularity_probe, solve_control};
use std::hint::black_box;

fn energy_derivatives(c: &mut Criterion) {
    let fx = Fixture::load("pull");
    let sol = fx.solve();
    c.bench_function("gradient pull", |b| b.iter(|| gradient(&fx.p, black_box(&sol.state), &fx.q).unwrap()));
    c.bench_function("hessian_apply pull", |b| {
        b.iter(|| hessian_apply(&fx.p, black_box(&sol.state), &sol.state).unwrap())
    });
}

fn forward(c: &mut Criterion) {
    for name in ["pull", "precracked"] {
        let fx = Fixture::load(name);
        c.bench_function(&format!("pdas {name}"), |b| b.iter(|| fx.solve()));
    }
}

fn checks(c: &mut Criterion) {
    let fx = Fixture::load("pull");
    let mut g = c.benchmark_group("checks");
    g.sample_size(10);
    g.bench_function("derivative_checks pull 10 points", |b| b.iter(|| derivative_checks(&fx.p, 10, 1).unwrap()));
    let sol = fx.solve();
    g.bench_function("regularity_probe pull", |b| b.iter(|| regularity_probe(&fx.p, &sol.state, 1e-8).unwrap()));
    g.finish();
}

fn control(c: &mut Criterion) {
    let fx = Fixture::load("control");
    let (spec, _, q_init) = fx.cfg.control_problem(&fx.p).unwrap().unwrap();
    let opts = fx.cfg.control_options().unwrap();
    let fwd = fraktur_core::lower::pdas_forward_solve(&fx.p, &q_init, &fx.phi0, &opts.pdas).unwrap();
    let mut g = c.benchmark_group("control");
    g.sample_size(10);
    g.bench_function("reduced_gradient", |b| b.iter(|| reduced_gradient(&fx.p, &q_init, &fwd, &spec).unwrap()));
    g.bench_function("solve_control", |b| b.iter(|| solve_control(&fx.p, &spec, &fx.phi0, &q_init, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, energy_derivatives, forward, checks, control);
criterion_main!(benches);
