//! Sequential against data-parallel execution for the three hot loops: the
//! GL history sums, the grid residual oracle and batch classification.

use std::collections::BTreeMap;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kmn_core::catalog::reduction_cases;
use kmn_core::expr::Expr;
use kmn_core::numerics::{gl_rl_derivative_with, pde_residual_on_grid_with, FracConfig, Grid};
use kmn_core::parallel::Strategy;
use kmn_core::pde::{CoeffForm, PdeSpec};
use kmn_core::symmetry::classify_all;

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn gl(c: &mut Criterion) {
    let mut group = c.benchmark_group("gl_rl_derivative");
    group.sample_size(10);
    for steps in [2_000usize, 8_000] {
        let grid = Grid::sample(0.0, 1.0, steps, |t| t * t).unwrap();
        let cfg = FracConfig::new(0.5);
        for (name, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, steps), &grid, |b, g| {
                b.iter(|| gl_rl_derivative_with(black_box(g), &cfg, strategy).unwrap())
            });
        }
    }
    group.finish();
}

fn residual(c: &mut Criterion) {
    let spec = PdeSpec::k23(Expr::rational(1, 2), CoeffForm::symbolic_power()).unwrap();
    let (x, t) = (Expr::sym("x"), Expr::sym("t"));
    let u = Expr::powi(&x, 2) * Expr::pow(t, Expr::rational(3, 2)) + x;
    let params = BTreeMap::from([("b".into(), 0.3), ("k".into(), 0.7)]);
    let points: Vec<(f64, f64)> = (0..400).map(|i| (0.5 + (i % 20) as f64 * 0.075, 0.5 + (i / 20) as f64 * 0.075)).collect();
    let mut group = c.benchmark_group("pde_residual_on_grid");
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| pde_residual_on_grid_with(&spec, &u, black_box(&points), &params, strategy).unwrap())
        });
    }
    group.finish();
}

fn classification(c: &mut Criterion) {
    let specs: Vec<PdeSpec> = reduction_cases().into_iter().map(|r| r.spec).collect();
    let mut group = c.benchmark_group("classify_all");
    group.sample_size(10);
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| classify_all(black_box(&specs), strategy)));
    }
    group.finish();
}

criterion_group!(benches, gl, residual, classification);
criterion_main!(benches);
