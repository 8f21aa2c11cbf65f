//! Shared fixtures for the benchmarks.

use heatreg_core::experiment::generate_dataset;
use heatreg_core::manifold::{build_spectral_basis, sample_uniform};
use heatreg_core::power_space::{make_source_target, DiffusionSpectrum, NoiseModel, TargetSpec};
use heatreg_core::{Dataset, HeatKernel, HeatKernelParams, ManifoldModel, Point};

pub fn kernel(model: ManifoldModel) -> HeatKernel {
    HeatKernel::for_tolerance(model, HeatKernelParams::default()).expect("default kernel")
}

pub fn points(model: ManifoldModel, n: usize) -> Vec<Point> {
    sample_uniform(model, n, 11).expect("sampling")
}

/// Noisy observations of a smooth target, drawn with the kernel's own basis.
pub fn dataset(kernel: &HeatKernel, n: usize) -> Dataset {
    let basis = build_spectral_basis(kernel.basis().model(), kernel.basis().len()).expect("basis");
    let spectrum = DiffusionSpectrum::new(&basis, kernel.params().t);
    let target = make_source_target(&spectrum, &TargetSpec { beta: 0.5, radius: 1.0, k_target: basis.len(), seed: 3 })
        .expect("target");
    generate_dataset(&target, &basis, n, NoiseModel::gaussian(0.5).expect("noise"), 5).expect("data")
}
