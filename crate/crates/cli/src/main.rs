use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use heatreg_core::experiment::{
    calibrate_c, fit_rate, level_medians, monotonicity_inversions, read_csv, run_convergence_sweep, write_csv,
};
use heatreg_core::filters::{audit_axioms, log_grid, qualification_margin};
use heatreg_core::heat_kernel::{circle_kernel_closed_form, sphere_kernel_addition, truncation_for_tolerance};
use heatreg_core::manifold::{build_spectral_basis, sample_uniform, weyl_envelope};
use heatreg_core::minimax::{
    build_hard_family, check_conditions, gilbert_varshamov, kl_divergence, lower_bound_recipe, pairwise,
    verify_packing, ConditionInputs, RecipeInputs,
};
use heatreg_core::power_space::{effdim_sweep, DiffusionSpectrum};
use heatreg_core::{Error, FilterFamily, HeatKernel, HeatKernelParams, ManifoldKind, ManifoldModel, Point};

mod config;
mod plot;

use config::SweepArgs;

const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERT: u8 = 3;

#[derive(Parser)]
#[command(name = "heatreg", version, about = "Spectral regularization with heat kernels on compact manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the truncated kernel expansion with closed forms.
    KernelCheck {
        #[arg(long, default_value = "circle")]
        manifold: String,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        /// Random point pairs to compare.
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit with status 3 unless the error is below 1e-10.
        #[arg(long)]
        assert: bool,
    },
    /// Audit filter axioms and qualification margins on a grid.
    FilterAudit {
        /// One family; all three when absent.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,5")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        lambda_min: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 60)]
        lambda_count: usize,
        #[arg(long, default_value_t = 400)]
        s_count: usize,
        /// Exit with status 3 if any axiom fails.
        #[arg(long)]
        assert: bool,
    },
    /// Effective dimension across a λ grid.
    Effdim {
        #[arg(long, default_value = "sphere2")]
        manifold: String,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
        lambdas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 3 if max/min of the bound ratio exceeds 3.
        #[arg(long)]
        assert: bool,
    },
    /// Convergence sweep over sample sizes and seeds.
    RateSweep {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Exit with status 3 if the fitted slope misses the target exponent.
        #[arg(long)]
        assert: bool,
        #[arg(long, default_value_t = 0.25)]
        slope_tol: f64,
        #[arg(long, default_value_t = 0.9)]
        min_r2: f64,
    },
    /// Score schedule constants on seeds disjoint from the sweep.
    Calibrate {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,1,3")]
        candidates: Vec<f64>,
        #[arg(long, default_value_t = 77)]
        calibration_seed: u64,
    },
    /// Build a hard family and audit the lower-bound hypotheses.
    MinimaxAudit {
        #[arg(long, default_value = "circle")]
        manifold: String,
        #[arg(long, default_value_t = 0.05)]
        t: f64,
        /// Block length; derived from n when absent.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Amplitude; derived from n when absent.
        #[arg(long)]
        eps: Option<f64>,
        /// Rate exponent of the amplitude; derived when absent.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Noise level σ̄.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.1)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV of pairwise distances and divergences.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 3 unless both conditions pass.
        #[arg(long)]
        assert: bool,
    },
    /// Log-log SVG chart of one or more sweep CSVs.
    Plot {
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERT),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Config(_)) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Returns `Ok(false)` when an `--assert` check fails.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::KernelCheck { manifold, t, tail_tol, pairs, seed, assert } => {
            let model = ManifoldModel::new(manifold.parse::<ManifoldKind>()?);
            let params = HeatKernelParams::new(t, tail_tol).map_err(as_config)?;
            let kernel = HeatKernel::for_tolerance(model, params)?;
            let xs = sample_uniform(model, pairs.max(1), seed)?;
            let ys = sample_uniform(model, pairs.max(1), seed.wrapping_add(1))?;
            let mut worst = 0.0f64;
            for (x, y) in xs.iter().zip(&ys) {
                let reference = closed_form(t, x, y)?;
                worst = worst.max((kernel.eval(x, y)? - reference).abs());
            }
            let diag = kernel.eval(&xs[0], &xs[0])?;
            println!("manifold: {}", model.kind);
            println!("t: {t}");
            println!("truncation: {} modes", kernel.basis().len());
            println!("kernel diagonal: {diag:.12}");
            println!("max |expansion - closed form|: {worst:.3e}");
            Ok(!assert || worst < 1e-10)
        }
        Command::FilterAudit { filter, alpha, lambda_min, lambda_max, lambda_count, s_count, assert } => {
            let families = match filter {
                Some(f) => vec![f.parse::<FilterFamily>()?],
                None => vec![FilterFamily::Tikhonov, FilterFamily::SpectralCutoff, FilterFamily::Landweber { steps: None }],
            };
            if !(lambda_min > 0.0 && lambda_min <= lambda_max) || lambda_count == 0 || s_count == 0 {
                return Err(Error::Config("λ grid needs 0 < min ≤ max and positive counts".into()).into());
            }
            let lambdas = log_grid(lambda_min, lambda_max, lambda_count);
            let ss = log_grid(1e-8, 1.0, s_count);
            let mut all_ok = true;
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["filter", "check", "value", "holds"])?;
            for fam in families {
                for c in audit_axioms(fam, &fam.audit_lambdas(&lambdas), &ss)? {
                    all_ok &= c.holds();
                    w.write_record([fam.to_string(), c.axiom.as_str().into(), c.worst_violation.to_string(), c.holds().to_string()])?;
                }
                for &a in &alpha {
                    let m = qualification_margin(fam, a, &fam.audit_lambdas(&lambdas), &ss)?;
                    w.write_record([fam.to_string(), format!("qualification_margin_alpha_{a}"), m.to_string(), (m <= 1.0).to_string()])?;
                }
            }
            w.flush()?;
            Ok(!assert || all_ok)
        }
        Command::Effdim { manifold, t, lambdas, out, assert } => {
            let model = ManifoldModel::new(manifold.parse::<ManifoldKind>()?);
            let rows = effdim_sweep(model, t, &lambdas).map_err(as_config)?;
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            w.write_record(["manifold", "t", "lambda", "N", "bound_ratio"])?;
            for r in &rows {
                w.write_record([model.kind.to_string(), t.to_string(), r.lambda.to_string(), r.n_eff.to_string(), r.bound_ratio.to_string()])?;
            }
            w.flush()?;
            let max = rows.iter().map(|r| r.bound_ratio).fold(f64::NEG_INFINITY, f64::max);
            let min = rows.iter().map(|r| r.bound_ratio).fold(f64::INFINITY, f64::min);
            eprintln!("certified D = {max:.6}, max/min ratio = {:.4}", max / min);
            Ok(!assert || max / min <= 3.0)
        }
        Command::RateSweep { sweep, assert, slope_tol, min_r2 } => {
            let (cfg, out) = sweep.resolve()?;
            let rows = run_convergence_sweep(&cfg)?;
            write_csv(&rows, output(out.as_deref())?)?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            let target = (cfg.beta - cfg.gamma) / cfg.beta;
            let levels = level_medians(&rows);
            for l in &levels {
                eprintln!(
                    "n = {:6}  median error² = {:.6e}  [q10 {:.3e}, q90 {:.3e}]  ({} ok cells)",
                    l.n, l.median_error_sq, l.q10_error_sq, l.q90_error_sq, l.ok_cells
                );
            }
            eprintln!("inversions between adjacent n: {}", monotonicity_inversions(&levels));
            match fit_rate(&rows, cfg.model().dim()) {
                Ok(fit) => {
                    eprintln!(
                        "slope = {:.4} (target {target:.4}), r² = {:.4}, failed cells = {failed}",
                        fit.slope, fit.r_squared
                    );
                    Ok(!assert || ((fit.slope - target).abs() <= slope_tol && fit.r_squared >= min_r2 && failed == 0))
                }
                Err(e) if !assert => {
                    eprintln!("no rate fit: {e}");
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("no rate fit: {e}");
                    Ok(false)
                }
            }
        }
        Command::Calibrate { sweep, candidates, calibration_seed } => {
            let (cfg, out) = sweep.resolve()?;
            let scores = calibrate_c(&cfg, &candidates, calibration_seed)?;
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            w.write_record(["c", "mean_log_error_sq"])?;
            for s in &scores {
                w.write_record([s.c.to_string(), s.mean_log_error.to_string()])?;
            }
            w.flush()?;
            eprintln!("best c = {}", scores[0].c);
            Ok(true)
        }
        Command::MinimaxAudit { manifold, t, k, gamma, beta, eps, s, n, sigma, a, radius, seed, out, assert } => {
            minimax_audit(MinimaxArgs { manifold, t, k, gamma, beta, eps, s, n, sigma, a, radius, seed, out, assert })
        }
        Command::Plot { inputs, out } => {
            let mut series = Vec::new();
            for p in &inputs {
                let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
                let rows = read_csv(f)?;
                let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                series.push(plot::Series { label, rows });
            }
            std::fs::write(&out, plot::render(&series)).with_context(|| format!("writing {}", out.display()))?;
            Ok(true)
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Parameter(m) => Error::Config(m),
        other => other,
    }
}

fn closed_form(t: f64, x: &Point, y: &Point) -> Result<f64> {
    const IMAGES: usize = 60;
    Ok(match (*x, *y) {
        (Point::Circle { theta: a }, Point::Circle { theta: b }) => circle_kernel_closed_form(t, a, b, IMAGES)?,
        (Point::Torus { theta: a1, phi: a2 }, Point::Torus { theta: b1, phi: b2 }) => {
            circle_kernel_closed_form(t, a1, b1, IMAGES)? * circle_kernel_closed_form(t, a2, b2, IMAGES)?
        }
        (Point::Sphere(u), Point::Sphere(v)) => {
            let c = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
            sphere_kernel_addition(t, c, 400)?
        }
        _ => anyhow::bail!("points from different manifolds"),
    })
}

struct MinimaxArgs {
    manifold: String,
    t: f64,
    k: Option<usize>,
    gamma: f64,
    beta: f64,
    eps: Option<f64>,
    s: Option<f64>,
    n: usize,
    sigma: f64,
    a: f64,
    radius: f64,
    seed: u64,
    out: Option<PathBuf>,
    assert: bool,
}

fn minimax_audit(args: MinimaxArgs) -> Result<bool> {
    let model = ManifoldModel::new(args.manifold.parse::<ManifoldKind>()?);
    if !(args.a > 0.0 && args.a < 0.125) {
        return Err(Error::Config(format!("a must lie in (0, 1/8), got {}", args.a)).into());
    }
    if !(args.gamma >= 0.0 && args.beta > args.gamma) {
        return Err(Error::Config("need 0 ≤ γ < β".into()).into());
    }
    // The envelope needs a basis past the family's window; size it generously.
    let probe = truncation_for_tolerance(model, args.t, 1e-12).unwrap_or(64);
    let len = probe.max(4 * args.k.unwrap_or(64)).max(256);
    let basis = build_spectral_basis(model, len)?;
    let weyl = weyl_envelope(&basis, 2)?;
    let spectrum = DiffusionSpectrum::new(&basis, args.t);
    let recipe = lower_bound_recipe(
        &spectrum,
        &RecipeInputs {
            n: args.n,
            beta: args.beta,
            gamma: args.gamma,
            sigma_bar: args.sigma,
            a: args.a,
            radius: args.radius,
            weyl,
        },
    )
    .map_err(as_config)?;
    let k = args.k.unwrap_or(recipe.k);
    let s = args.s.unwrap_or(recipe.s);
    let eps = args.eps.unwrap_or(recipe.epsilon);
    let m = model.dim() as f64;
    let log_n = (args.n as f64).ln();
    let c_k = k as f64 / log_n.powf(m / 2.0);
    let c_eps = eps * (args.n as f64).powf(s);

    let code = gilbert_varshamov(k, args.seed).map_err(as_config)?;
    let family = build_hard_family(&spectrum, args.gamma, eps, code).map_err(as_config)?;
    let report = check_conditions(
        &family,
        &ConditionInputs {
            n: args.n,
            sigma_bar: args.sigma,
            a: args.a,
            radius: args.radius,
            beta: args.beta,
            weyl,
            s,
            c_k,
            c_eps,
        },
    )
    .map_err(as_config)?;

    if let Some(path) = &args.out {
        let mut w = csv::Writer::from_writer(output(Some(path))?);
        w.write_record(["i", "j", "hamming", "distance_sq", "kl"])?;
        for p in pairwise(&family)? {
            let kl = kl_divergence(&family.members[p.i], &family.members[p.j], args.n, args.sigma)?;
            w.write_record([p.i.to_string(), p.j.to_string(), p.hamming.to_string(), p.distance_sq.to_string(), kl.to_string()])?;
        }
        w.flush()?;
    }

    let verdict = |b: bool| if b { "pass" } else { "fail" };
    println!("manifold: {}  t: {}  n: {}", model.kind, args.t, args.n);
    println!("k: {k}  ε: {eps:.6e}  s: {s:.4}  C_k: {c_k:.4}  C_ε: {c_eps:.6e}");
    println!("code: {} strings, min distance {}", family.code.strings().len(), family.code.min_distance());
    println!("weyl envelope: c_low {:.4}  c_up {:.4}", weyl.c_low, weyl.c_up);
    println!("min packing distance²: {:.6e} (ε·k/8 = {:.6e})", verify_packing(&family)?, eps * k as f64 / 8.0);
    println!(
        "source condition: max ‖f_i‖_β² = {:.6e} vs R² = {:.6e}: {}",
        report.max_source_norm_sq,
        report.radius_sq,
        verdict(report.source_ok)
    );
    println!("divergence condition: max KL = {:.6e} vs a log K = {:.6e}: {}", report.max_kl, report.kl_budget, verdict(report.kl_ok));
    println!(
        "exponent checks (indicative): source {:.4} {}, divergence {:.4} {}",
        report.source_exponent,
        verdict(report.source_exponent_ok),
        report.kl_exponent,
        verdict(report.kl_exponent_ok)
    );
    Ok(!args.assert || report.passed())
}
