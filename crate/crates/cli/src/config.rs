//! Sweep configuration: a TOML file whose keys mirror the command-line flags,
//! with flags taking precedence.

use std::path::{Path, PathBuf};

use clap::Args;
use heatreg_core::experiment::{ExperimentConfig, FitRoute};
use heatreg_core::{Error, FilterFamily, ManifoldKind};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub manifold: Option<String>,
    pub t: Option<f64>,
    pub filter: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(alias = "R")]
    pub radius: Option<f64>,
    pub sigma: Option<f64>,
    pub n_grid: Option<Vec<usize>>,
    pub seeds: Option<u64>,
    pub c: Option<f64>,
    pub k_target: Option<usize>,
    pub target_seed: Option<u64>,
    pub data_seed: Option<u64>,
    pub tail_tol: Option<f64>,
    pub route: Option<String>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// TOML file with sweep settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub manifold: Option<String>,
    /// Diffusion time of the heat kernel.
    #[arg(long)]
    pub t: Option<f64>,
    /// tikhonov, cutoff, landweber or landweber:<steps>
    #[arg(long)]
    pub filter: Option<String>,
    /// Smoothness of the target.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Norm index of the reported error.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Norm budget of the target.
    #[arg(long, alias = "R")]
    pub radius: Option<f64>,
    /// Noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Comma-separated ascending sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Constant in the regularization schedule.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub k_target: Option<usize>,
    #[arg(long)]
    pub target_seed: Option<u64>,
    #[arg(long)]
    pub data_seed: Option<u64>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// feature (default) or dense
    #[arg(long)]
    pub route: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    /// Defaults, then the config file, then flags. Returns the validated
    /// configuration and the output path.
    pub fn resolve(&self) -> Result<(ExperimentConfig, Option<PathBuf>), Error> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let mut cfg = ExperimentConfig::default();
        macro_rules! pick {
            ($field:ident) => {
                self.$field.clone().or(file.$field.clone())
            };
        }
        if let Some(m) = pick!(manifold) {
            cfg.manifold = m.parse::<ManifoldKind>()?;
        }
        if let Some(f) = pick!(filter) {
            cfg.filter = f.parse::<FilterFamily>()?;
        }
        if let Some(r) = pick!(route) {
            cfg.route = r.parse::<FitRoute>()?;
        }
        if let Some(g) = pick!(n_grid) {
            cfg.n_grid = g;
        }
        cfg.t = pick!(t).unwrap_or(cfg.t);
        cfg.beta = pick!(beta).unwrap_or(cfg.beta);
        cfg.gamma = pick!(gamma).unwrap_or(cfg.gamma);
        cfg.radius = pick!(radius).unwrap_or(cfg.radius);
        cfg.sigma = pick!(sigma).unwrap_or(cfg.sigma);
        cfg.seeds = pick!(seeds).unwrap_or(cfg.seeds);
        cfg.c = pick!(c).unwrap_or(cfg.c);
        cfg.k_target = pick!(k_target).unwrap_or(cfg.k_target);
        cfg.target_seed = pick!(target_seed).unwrap_or(cfg.target_seed);
        cfg.data_seed = pick!(data_seed).unwrap_or(cfg.data_seed);
        cfg.tail_tol = pick!(tail_tol).unwrap_or(cfg.tail_tol);
        cfg.validate()?;
        Ok((cfg, self.out.clone().or(file.output)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn empty() -> SweepArgs {
        SweepArgs {
            config: None,
            manifold: None,
            t: None,
            filter: None,
            beta: None,
            gamma: None,
            radius: None,
            sigma: None,
            n_grid: None,
            seeds: None,
            c: None,
            k_target: None,
            target_seed: None,
            data_seed: None,
            tail_tol: None,
            route: None,
            out: None,
        }
    }

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "manifold = \"sphere2\"\nbeta = 0.8\nR = 2.0\nn_grid = [16, 32, 64]\nfilter = \"cutoff\"").unwrap();
        let args = SweepArgs { config: Some(f.path().to_path_buf()), beta: Some(0.6), ..empty() };
        let (cfg, out) = args.resolve().unwrap();
        assert_eq!(cfg.manifold, ManifoldKind::Sphere2);
        assert_eq!(cfg.beta, 0.6);
        assert_eq!(cfg.radius, 2.0);
        assert_eq!(cfg.n_grid, vec![16, 32, 64]);
        assert_eq!(cfg.filter, FilterFamily::SpectralCutoff);
        assert!(out.is_none());
    }

    #[test]
    fn bad_values_are_config_errors() {
        let args = SweepArgs { manifold: Some("klein".into()), ..empty() };
        assert!(matches!(args.resolve(), Err(Error::Config(_))));
        let args = SweepArgs { gamma: Some(0.5), beta: Some(0.5), ..empty() };
        assert!(matches!(args.resolve(), Err(Error::Config(_))));
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "bogus_key = 1").unwrap();
        let args = SweepArgs { config: Some(f.path().to_path_buf()), ..empty() };
        assert!(matches!(args.resolve(), Err(Error::Config(_))));
    }
}
