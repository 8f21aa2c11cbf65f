//! Spectral regularization with heat kernels on compact manifolds.

pub mod error;
pub mod estimator;
pub mod experiment;
pub mod filters;
pub mod heat_kernel;
pub mod manifold;
pub mod minimax;
pub mod power_space;
pub mod rng;

pub use error::{Error, Result};
pub use estimator::{Dataset, SpectralEstimate};
pub use filters::FilterFamily;
pub use heat_kernel::{HeatKernel, HeatKernelParams, KernelMatrix};
pub use manifold::{ManifoldKind, ManifoldModel, Point, SpectralBasis};
pub use power_space::{DiffusionSpectrum, NoiseModel, PowerCoefficients, TargetSpec};
