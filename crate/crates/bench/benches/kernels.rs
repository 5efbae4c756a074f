use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use polylike::geometry::degree_estimate;
use polylike::green1d::{green, DEFAULT_N_MAX};
use polylike::measure::{backward_walk, invariance_report};
use polylike::observables::default_test_functions;
use polylike::periodic::periodic_points;
use polylike::roots::poly_roots;
use polylike::spectrum::{default_epsilons, entropy_estimate, lyapunov};
use polylike::{fiber, iterated_fiber, Poly, Seed, C64, REFERENCE_NAMES};
use polylike_bench::{cloud, generic_point, map};
use std::hint::black_box;

fn fibers(c: &mut Criterion) {
    let mut g = c.benchmark_group("fiber");
    for name in REFERENCE_NAMES {
        let m = map(name);
        let z = generic_point(&m);
        g.bench_function(name, |b| b.iter(|| fiber(&m, black_box(&z), 1e-8).unwrap()));
    }
    g.finish();

    let m = map("wd2z");
    let z = generic_point(&m);
    c.bench_function("iterated_fiber/wd2z/n=6", |b| {
        b.iter(|| iterated_fiber(&m, &z, 6, 1 << 20).unwrap())
    });
}

fn roots(c: &mut Criterion) {
    let mut g = c.benchmark_group("poly_roots");
    for d in [8usize, 32, 128] {
        let mut coeffs = vec![C64::new(0.0, 0.0); d + 1];
        coeffs[0] = C64::new(-1.0, 0.3);
        coeffs[1] = C64::new(0.5, 0.0);
        coeffs[d] = C64::new(1.0, 0.0);
        let p = Poly::new(coeffs);
        g.bench_with_input(BenchmarkId::from_parameter(d), &p, |b, p| {
            b.iter(|| poly_roots(p).unwrap())
        });
    }
    g.finish();
}

fn walks(c: &mut Criterion) {
    let mut g = c.benchmark_group("backward_walk");
    g.throughput(Throughput::Elements(1000));
    for name in ["doubling", "skew", "wd2z"] {
        let m = map(name);
        let z = generic_point(&m);
        g.bench_function(name, |b| {
            let mut rng = Seed(1).stream(0);
            b.iter(|| backward_walk(&m, &z, 0, 1000, &mut rng).unwrap())
        });
    }
    g.finish();
}

fn periodic(c: &mut Criterion) {
    let mut g = c.benchmark_group("periodic_points");
    g.sample_size(10);
    let doubling = map("doubling");
    for n in [6, 10] {
        g.bench_with_input(BenchmarkId::new("doubling", n), &n, |b, &n| {
            b.iter(|| periodic_points(&doubling, n, 1e-8).unwrap())
        });
    }
    let skew = map("skew");
    g.bench_function("skew/6", |b| {
        b.iter(|| periodic_points(&skew, 6, 1e-8).unwrap())
    });
    g.finish();
}

fn statistics(c: &mut Criterion) {
    let mut g = c.benchmark_group("statistics");
    g.sample_size(10);
    let skew = map("skew");
    let sc = cloud(&skew, 100);
    g.bench_function("lyapunov/skew/100x200", |b| {
        b.iter(|| lyapunov(&skew, &sc, 200, 100, Seed(2)).unwrap())
    });

    let torus = map("torus");
    let tc = cloud(&torus, 2000);
    let fns = default_test_functions(torus.domain());
    g.bench_function("invariance/torus/2000", |b| {
        b.iter(|| invariance_report(&torus, &tc, &fns).unwrap())
    });

    let doubling = map("doubling");
    let dc = cloud(&doubling, 5000);
    let eps = default_epsilons(&dc);
    g.bench_function("entropy/doubling/5000", |b| {
        b.iter(|| entropy_estimate(&doubling, &dc, &eps, 10).unwrap())
    });

    g.bench_function("degree/torus/n=6", |b| {
        b.iter(|| degree_estimate(&torus, 1, 6, 5000, Seed(3)).unwrap())
    });
    g.finish();

    let cheb = map("chebyshev");
    c.bench_function("green/chebyshev", |b| {
        b.iter(|| green(&cheb, black_box(C64::new(1.3, 0.7)), DEFAULT_N_MAX, 1e-12).unwrap())
    });
}

criterion_group!(benches, fibers, roots, walks, periodic, statistics);
criterion_main!(benches);
