use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hartree_core::rearrange::SchwarzPlan;
use hartree_core::{Field, GridSpec, ProblemParams, RieszPlan, SolveConfig, Solver};

fn gaussian(spec: GridSpec) -> Field {
    Field::from_fn(spec, |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp())
}

fn riesz(c: &mut Criterion) {
    let mut group = c.benchmark_group("riesz_apply");
    for (n, m) in [(1, 1024), (2, 128), (3, 32), (3, 64)] {
        let spec = GridSpec::new(n, 8.0, m).unwrap();
        let plan = RieszPlan::new(spec, n as f64 / 2.0).unwrap();
        let f = gaussian(spec);
        group.bench_with_input(BenchmarkId::new(format!("N{n}"), m), &f, |b, f| {
            b.iter(|| plan.apply(black_box(f)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new(format!("pair_N{n}"), m), &f, |b, f| {
            b.iter(|| plan.apply_pair(black_box(f), black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn solver_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver_step");
    group.sample_size(20);
    for m in [32, 64] {
        let params = ProblemParams::new(3, 2.0, 2.0, 2.0).unwrap();
        let solver =
            Solver::new(SolveConfig::new(params, GridSpec::new(3, 8.0, m).unwrap())).unwrap();
        let it = solver.start(&solver.initialize()).unwrap();
        group.bench_function(BenchmarkId::new("gradient_and_step", m), |b| {
            b.iter(|| {
                let (_, g) = solver.gradient(black_box(&it));
                solver.step(&it, &g).unwrap()
            })
        });
    }
    group.finish();
}

fn schwarz(c: &mut Criterion) {
    let spec = GridSpec::new(3, 8.0, 64).unwrap();
    let plan = SchwarzPlan::new(spec);
    let f = gaussian(spec).shifted(&[3, -2, 1]);
    c.bench_function("schwarz/N3/64", |b| {
        b.iter(|| plan.apply(black_box(&f)).unwrap())
    });
}

criterion_group!(benches, riesz, solver_step, schwarz);
criterion_main!(benches);
