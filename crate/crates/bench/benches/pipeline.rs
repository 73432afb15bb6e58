use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::DVector;

use drmat::hypothesis::{drmat, s_hat2, s_n, zfn, TestConfig, ZfnVariant};
use drmat::kernels::product_kernel;
use drmat::scenarios::{generate, CovarianceKind, ExampleId, ScenarioSpec};
use drmat::sdr::{dee_matrix, default_ridge_constant, estimate_basis};
use drmat::smoothing::nw_regress;

use drmat_bench::fixture;

fn bench_kernels(c: &mut Criterion) {
    c.bench_function("product_kernel d=2", |b| {
        b.iter(|| product_kernel(black_box(&[0.3, -0.4]), black_box(0.8)).unwrap())
    });
}

fn bench_smoothing(c: &mut Criterion) {
    let data = fixture(400, 4, 0.0);
    let basis = estimate_basis(&data.x, &data.y, default_ridge_constant(400).unwrap()).unwrap();
    let reduced = &data.x * &basis.basis;
    c.bench_function("nw_regress n=400 d=1", |b| {
        b.iter(|| nw_regress(black_box(&reduced), black_box(&data.y), 0.3).unwrap())
    });
}

fn bench_sdr(c: &mut Criterion) {
    let data = fixture(400, 8, 0.0);
    c.bench_function("dee_matrix n=400 p=8", |b| {
        b.iter(|| dee_matrix(black_box(&data.x), black_box(&data.y)).unwrap())
    });
}

fn bench_statistics(c: &mut Criterion) {
    let data = fixture(400, 4, 0.0);
    let basis = estimate_basis(&data.x, &data.y, default_ridge_constant(400).unwrap()).unwrap();
    let reduced = &data.x * &basis.basis;
    let mu = DVector::from_fn(400, |i, _| (i as f64 * 0.618).sin());
    c.bench_function("s_n n=400 d=1", |b| {
        b.iter(|| s_n(black_box(&reduced), black_box(&mu), 0.38).unwrap())
    });
    c.bench_function("s_hat2 n=400 d=1", |b| {
        b.iter(|| s_hat2(black_box(&reduced), black_box(&mu), 0.38).unwrap())
    });
}

fn bench_tests(c: &mut Criterion) {
    let data = fixture(400, 4, 0.6);
    let cfg = TestConfig::default();
    c.bench_function("drmat end-to-end n=400 p=4", |b| {
        b.iter(|| drmat(black_box(&data), black_box(&cfg)).unwrap())
    });

    let small = fixture(200, 2, 0.6);
    let boot_cfg = TestConfig {
        boot_reps: 100,
        ..TestConfig::default()
    };
    let mut group = c.benchmark_group("marked-process");
    group.sample_size(20);
    group.bench_function("zfn n=200 p=2 boot=100", |b| {
        b.iter(|| zfn(black_box(&small), black_box(&boot_cfg), ZfnVariant::Full).unwrap())
    });
    group.finish();
}

fn bench_harness_unit(c: &mut Criterion) {
    let spec = ScenarioSpec::new(ExampleId::Ex1, 400, 4, 0.0, CovarianceKind::Sigma1, 99);
    c.bench_function("generate ex1 n=400 p=4", |b| {
        b.iter(|| generate(black_box(&spec)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_kernels,
    bench_smoothing,
    bench_sdr,
    bench_statistics,
    bench_tests,
    bench_harness_unit
);
criterion_main!(benches);
