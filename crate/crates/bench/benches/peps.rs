use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use peps_bench::{half, mn_family, parse_input};
use peps_core::chain::analyze;
use peps_core::corpus::{mk_example1, mk_example2};
use peps_core::montecarlo::estimate;
use peps_core::pars::evolve_trace;
use peps_core::strategy::{n_steps, Deterministic};
use peps_core::{parse, Strategy};
use std::hint::black_box;

fn parsing(c: &mut Criterion) {
    let text = parse_input(20);
    c.bench_function("parse", |b| b.iter(|| parse(black_box(&text)).unwrap()));
}

fn deterministic(c: &mut Criterion) {
    let mut g = c.benchmark_group("n_steps");
    for (n, t) in mn_family() {
        g.bench_with_input(BenchmarkId::new("lo", n), &t, |b, t| b.iter(|| n_steps(t, Deterministic::Lo, 1000)));
    }
    g.finish();
}

fn chain_solve(c: &mut Criterion) {
    let s = Strategy::PEps(half());
    let mut g = c.benchmark_group("analyze");
    for (n, t) in mn_family() {
        g.bench_with_input(BenchmarkId::new("Mn", n), &t, |b, t| b.iter(|| analyze(t, &s, 100_000).unwrap()));
    }
    g.finish();
}

fn trace(c: &mut Criterion) {
    let s = Strategy::PEps(half());
    c.bench_function("evolve_trace example1 h=500", |b| b.iter(|| evolve_trace(&mk_example1(), &s, 500)));
}

fn monte_carlo(c: &mut Criterion) {
    let s = Strategy::PEps(half());
    let t = mk_example2();
    c.bench_function("estimate example2 n=1000", |b| b.iter(|| estimate(&t, &s, 0, 1000, 1000)));
}

criterion_group!(benches, parsing, deterministic, chain_solve, trace, monte_carlo);
criterion_main!(benches);
