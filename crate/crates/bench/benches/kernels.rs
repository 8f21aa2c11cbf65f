use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heatreg_bench::{dataset, kernel, points};
use heatreg_core::estimator::{fit, fit_feature_space};
use heatreg_core::{FilterFamily, ManifoldModel};
use std::hint::black_box;

fn basis_eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("basis_eval");
    for model in [ManifoldModel::circle(), ManifoldModel::torus2(), ManifoldModel::sphere2()] {
        let k = kernel(model);
        let xs = points(model, 256);
        g.bench_function(model.kind.to_string(), |b| {
            b.iter(|| k.basis().design_matrix(black_box(&xs)).unwrap())
        });
    }
    g.finish();
}

fn kernel_matrix(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel_matrix");
    let model = ManifoldModel::sphere2();
    let k = kernel(model);
    for n in [64, 256] {
        let xs = points(model, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &xs, |b, xs| b.iter(|| k.matrix(black_box(xs)).unwrap()));
    }
    g.finish();
}

fn fits(c: &mut Criterion) {
    let mut g = c.benchmark_group("fit");
    g.sample_size(20);
    let k = kernel(ManifoldModel::circle());
    let data = dataset(&k, 512);
    let gram = k.matrix(&data.points).unwrap();
    for family in [FilterFamily::Tikhonov, FilterFamily::SpectralCutoff, FilterFamily::Landweber { steps: None }] {
        g.bench_function(format!("dense/{family}"), |b| {
            b.iter(|| fit(black_box(&gram), &data, family, 1e-3, k.params().t).unwrap())
        });
        g.bench_function(format!("feature/{family}"), |b| {
            b.iter(|| fit_feature_space(black_box(&k), &data, family, 1e-3).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, basis_eval, kernel_matrix, fits);
criterion_main!(benches);
