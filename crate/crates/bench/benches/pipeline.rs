use blowup_bench::{algebraic_trajectory, example1_differential_system, example2_system};
use blowup_core::blowup::{estimate_x_star, fit_power_law};
use blowup_core::expr::{parse, Binding, Var};
use blowup_core::ode::{integrate, rk4_step, StopRule};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn bench_expr(c: &mut Criterion) {
    let mut g = c.benchmark_group("expr");
    g.bench_function("parse_arc_length_g", |b| {
        b.iter(|| parse(black_box("(1+abs(t)^2+abs(2*y^3)^2)^0.5")).unwrap())
    });
    let f = parse("2*y^3").unwrap();
    g.bench_function("differentiate", |b| {
        b.iter(|| black_box(&f).differentiate(Var::Y))
    });
    let d = f.differentiate(Var::Y);
    let binding = Binding::xyt(0.3, 1.7, 2.9);
    g.bench_function("eval_derivative", |b| {
        b.iter(|| black_box(&d).eval(black_box(&binding)).unwrap())
    });
    g.finish();
}

fn bench_integrate(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate");
    let nonlocal = example2_system();
    g.bench_function("rk4_step_example2", |b| {
        let state = [0.5, 3.0];
        b.iter(|| rk4_step(nonlocal.system(), black_box(1.0), black_box(&state), 0.2).unwrap())
    });
    g.bench_function("example2_70_steps", |b| {
        let stop = StopRule::default()
            .with_max_param(14.0)
            .with_derivative_decay(0.0);
        b.iter(|| integrate(nonlocal.system(), 0.2, &stop).unwrap())
    });
    let differential = example1_differential_system();
    g.bench_function("example1_differential_5000_steps", |b| {
        let stop = StopRule::default()
            .with_max_steps(5000)
            .with_derivative_decay(0.0);
        b.iter(|| integrate(differential.system(), 0.2, &stop).unwrap())
    });
    g.finish();
}

fn bench_estimate(c: &mut Criterion) {
    let mut g = c.benchmark_group("blowup");
    let long = algebraic_trajectory(50_000);
    g.bench_function("estimate_x_star_ladder_50k", |b| {
        b.iter(|| estimate_x_star(black_box(&long)).unwrap())
    });
    let est = estimate_x_star(&long).unwrap();
    g.bench_function("fit_power_law_50k", |b| {
        b.iter(|| fit_power_law(black_box(&long), est.x_star).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_expr, bench_integrate, bench_estimate);
criterion_main!(benches);
