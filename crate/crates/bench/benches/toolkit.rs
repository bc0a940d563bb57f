use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mveu_bench::{banded_market, banded_universe, ladder_asset};
use mveu_core::borch::{construct, paradox_verdict, Branch};
use mveu_core::capm::capm_round_trip;
use mveu_core::distributions::{mixture, MomentPair};
use mveu_core::dominance::{fsd, fsd_filter, ssd};
use mveu_core::frontier::{frontier_sample, tangency_portfolio};
use mveu_core::indifference::{chipman_residual, default_step, MeritFunction};

fn two_point(c: &mut Criterion) {
    let (m1, m2) = (MomentPair::new(10.0, 15.0).unwrap(), MomentPair::new(20.0, 25.0).unwrap());
    c.bench_function("construct_and_verdict", |b| {
        b.iter(|| {
            let pair = construct(black_box(m1), black_box(m2), Branch::Primary).unwrap();
            paradox_verdict(&pair)
        })
    });
}

fn dominance(c: &mut Criterion) {
    let mut group = c.benchmark_group("dominance");
    for n in [8, 64, 512] {
        let (hi, lo) = (ladder_asset(n, 1.0), ladder_asset(n, 0.0));
        group.bench_with_input(BenchmarkId::new("fsd", n), &n, |b, _| b.iter(|| fsd(&hi, &lo)));
        group.bench_with_input(BenchmarkId::new("ssd", n), &n, |b, _| b.iter(|| ssd(&hi, &lo)));
        group.bench_with_input(BenchmarkId::new("mixture", n), &n, |b, _| {
            b.iter(|| mixture(&hi, &lo, black_box(0.3)).unwrap())
        });
    }
    let shelf: Vec<_> = (0..32).map(|k| ladder_asset(6, 0.25 * k as f64)).collect();
    group.bench_function("fsd_filter_32", |b| b.iter(|| fsd_filter(&shelf).unwrap()));
    group.finish();
}

fn frontier(c: &mut Criterion) {
    let mut group = c.benchmark_group("frontier");
    for n in [5, 20, 100] {
        let u = banded_universe(n);
        let grid: Vec<f64> = (0..64).map(|k| 0.05 + 0.01 * (n - 1) as f64 * k as f64 / 63.0).collect();
        group.bench_with_input(BenchmarkId::new("sample_64", n), &n, |b, _| {
            b.iter(|| frontier_sample(&u, &grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("tangency", n), &n, |b, _| {
            b.iter(|| tangency_portfolio(&u, black_box(0.01)).unwrap())
        });
    }
    group.finish();
}

fn capm(c: &mut Criterion) {
    let mut group = c.benchmark_group("capm");
    for n in [5, 50] {
        let m = banded_market(n);
        group.bench_with_input(BenchmarkId::new("round_trip", n), &n, |b, _| {
            b.iter(|| capm_round_trip(&m).unwrap())
        });
    }
    group.finish();
}

fn heat_residual(c: &mut Criterion) {
    let v = MeritFunction::cara_normal(0.5);
    c.bench_function("chipman_grid_20x20", |b| {
        b.iter(|| {
            let mut worst = 0.0_f64;
            for i in 0..20 {
                for j in 0..20 {
                    let (s, m) = (0.5 + 0.075 * i as f64, -1.0 + 0.15 * j as f64);
                    worst = worst.max(chipman_residual(&v, s, m, default_step(s, m)).unwrap().abs());
                }
            }
            worst
        })
    });
}

criterion_group!(benches, two_point, dominance, frontier, capm, heat_residual);
criterion_main!(benches);
