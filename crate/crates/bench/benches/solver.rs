use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as Complex;
use vanvleck_core::analysis::hull_report;
use vanvleck_core::{
    build_classical, solve, ClassicalSpec, LameOperator, Polynomial, SolveOptions,
};

fn figure_operator() -> LameOperator {
    let c = Complex::new;
    let q3 = Polynomial::from_roots(&[c(0.0, 1.0), c(0.0, -1.0), c(2.0, 3.0), c(3.0, -2.0)]);
    LameOperator::new(vec![Polynomial::zero(), Polynomial::zero(), q3]).unwrap()
}

fn classical(r: usize) -> LameOperator {
    let alphas = [-1.0, -0.3, 0.4, 1.0, 1.6];
    let betas = [0.5, 1.0, 0.7, 0.3, 0.9];
    let l = r + 2;
    build_classical(&ClassicalSpec::real(&alphas[..l], &betas[..l], 2)).unwrap()
}

fn bench_r1(c: &mut Criterion) {
    let op = figure_operator();
    let opts = SolveOptions::default();
    let mut g = c.benchmark_group("solve_r1");
    for n in [5, 10, 20] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve(black_box(&op), n, &opts).unwrap())
        });
    }
    g.finish();
}

fn bench_r2(c: &mut Criterion) {
    let op = classical(2);
    let opts = SolveOptions::default();
    let mut g = c.benchmark_group("solve_r2");
    g.sample_size(10);
    for n in [2, 4, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve(black_box(&op), n, &opts).unwrap())
        });
    }
    g.finish();
}

fn bench_hull(c: &mut Criterion) {
    let op = classical(1);
    let report = solve(&op, 8, &SolveOptions::default()).unwrap();
    c.bench_function("hull_report_r1_n8", |b| {
        b.iter(|| hull_report(black_box(&op), &report.pairs, 1e-6).unwrap())
    });
}

criterion_group!(benches, bench_r1, bench_r2, bench_hull);
criterion_main!(benches);
