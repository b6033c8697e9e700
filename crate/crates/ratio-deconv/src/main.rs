//! Command-line front end: catalog listing, deconvolution jobs, and the
//! verification suite.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 configuration/capability/usage, 3 numeric failure. Set
//! `RATIO_DECONV_LOG=debug|info` for progress diagnostics on stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ratio_deconv::closed_form::CASE_NAMES;
use ratio_deconv::decomp::kernel_class;
use ratio_deconv::deconv::{deconvolve, diagnostics_path, DeconvolutionProblem, GridSpec};
use ratio_deconv::dist::{DistributionSpec, Support};
use ratio_deconv::laplace::InversionConfig;
use ratio_deconv::verify::{
    self, summary_header, MomentCheck, VerificationReport,
};
use ratio_deconv::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ratio-deconv",
    version,
    about = "Recover the density of X in Z = X/(X+Y) from the densities of Z and Y"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the distribution catalog and per-family capabilities
    Catalog(CatalogArgs),
    /// Run one deconvolution job from a JSON config and write the grid CSV
    Deconvolve(DeconvolveArgs),
    /// Run verification cases and write a JSON summary
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CatalogArgs {
    /// Only show families with this support
    #[arg(long, value_enum)]
    support: Option<SupportFilter>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportFilter {
    /// positive half-line (candidate X / Y families)
    Positive,
    /// unit interval (ratio laws, candidate Z families)
    Unit,
}

#[derive(Args)]
struct DeconvolveArgs {
    /// Path to the job config JSON
    #[arg(long)]
    config: PathBuf,
    /// Write the grid CSV here instead of the config's `outputs.grid_csv`
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    inversion: InversionOverride,
}

#[derive(Args)]
struct VerifyArgs {
    /// Registry case names to run (see `catalog` / docs)
    cases: Vec<String>,
    /// Run all nine registry cases plus the moment-formula audit
    #[arg(long, conflicts_with = "cases")]
    all: bool,
    /// Run the deliberately corrupted beta-gamma case (expected to fail)
    #[arg(long, conflicts_with_all = ["cases", "all"])]
    negative_control: bool,
    /// Master seed for the Monte Carlo legs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample size (0 skips the KS legs)
    #[arg(long, default_value_t = 100_000)]
    mc: usize,
    /// Where to write the JSON summary
    #[arg(long, default_value = "verify-summary.json")]
    out: PathBuf,
    #[command(flatten)]
    inversion: InversionOverride,
}

#[derive(Args)]
struct InversionOverride {
    /// Override the inversion engine (cases otherwise use their tuned one)
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Gaver-Stehfest order (even), with --method gaver-stehfest
    #[arg(long, default_value_t = 14, requires = "method")]
    order: usize,
    /// Talbot contour node count, with --method talbot
    #[arg(long, default_value_t = 32, requires = "method")]
    nodes: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    GaverStehfest,
    Talbot,
}

impl InversionOverride {
    fn build(&self) -> Option<InversionConfig> {
        self.method.map(|m| match m {
            MethodArg::GaverStehfest => InversionConfig::gaver_stehfest(self.order),
            MethodArg::Talbot => InversionConfig::talbot(self.nodes),
        })
    }
}

/// One deconvolution job: the problem plus where to put the results.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    z_spec: DistributionSpec,
    y_spec: DistributionSpec,
    grid: GridSpec,
    inversion: InversionConfig,
    outputs: JobOutputs,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobOutputs {
    grid_csv: PathBuf,
    /// Defaults to the CSV path with a `.diagnostics.json` extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diagnostics_json: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifySummary {
    reports: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moment_checks: Option<Vec<MomentCheck>>,
    all_passed: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RATIO_DECONV_LOG")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Catalog(args) => cmd_catalog(&args).map(|()| ExitCode::SUCCESS),
        Command::Deconvolve(args) => cmd_deconvolve(&args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

// --- catalog ----------------------------------------------------------------

/// One exemplar per family fixes the capability columns; the parameter
/// list is part of each family's public JSON contract.
fn catalog_rows() -> Vec<(DistributionSpec, &'static str)> {
    use DistributionSpec::*;
    vec![
        (Exponential { lambda: 1.0 }, "lambda"),
        (Gamma { shape: 1.0, rate: 1.0 }, "shape, rate"),
        (GeneralizedGamma { a: 1.0, d: 1.0, theta: 1.0 }, "a, d, theta"),
        (Weibull { theta: 1.0, beta: 1.0 }, "theta, beta"),
        (WeightedLindley { c: 1.0, beta: 1.0 }, "c, beta"),
        (GeneralizedBetaPrime { alpha: 1.0, beta: 1.0, lambda: 1.0 }, "alpha, beta, lambda"),
        (Lomax { shape: 1.0, scale: 1.0 }, "shape, scale"),
        (Kumaraswamy { a: 1.0, b: 1.0 }, "a, b"),
        (Beta { alpha: 1.0, beta: 1.0 }, "alpha, beta"),
        (Bbeta { alpha: 1.0, beta: 1.0, rho: 0.5, delta: 0.5 }, "alpha, beta, rho, delta"),
        (ToppLeone { v: 1.0 }, "v"),
        (WlRatio { c: 1.0, beta: 1.0, lambda: 1.0 }, "c, beta, lambda"),
        (
            GgRatio { a1: 1.0, d1: 1.0, a2: 1.0, d2: 1.0, theta: 1.0 },
            "a1, d1, a2, d2, theta",
        ),
        (Uw2 { theta: 1.0, beta: 1.0 }, "theta, beta"),
        (BetaMixWl { a: 1.0, b: 1.0 }, "a, b"),
        (
            GbpRatio {
                alpha1: 1.0,
                beta1: 1.0,
                alpha2: 1.0,
                beta2: 1.0,
                lambda1: 1.0,
                lambda2: 1.0,
            },
            "alpha1, beta1, alpha2, beta2, lambda1, lambda2",
        ),
    ]
}

fn cmd_catalog(args: &CatalogArgs) -> Result<()> {
    let wanted = args.support.map(|f| match f {
        SupportFilter::Positive => Support::PositiveHalfLine,
        SupportFilter::Unit => Support::UnitInterval,
    });
    println!(
        "{:<23} {:<46} {:<9} kernel: {:<11} {:<8} {}",
        "family", "parameters", "support", "class", "complex", "sampler"
    );
    for (spec, params) in catalog_rows() {
        if wanted.is_some_and(|w| spec.support() != w) {
            continue;
        }
        println!(
            "{:<23} {:<46} {:<9} kernel: {:<11} {:<8} {}",
            spec.family(),
            params,
            spec.support().to_string(),
            kernel_class(&spec).unwrap_or("-"),
            if spec.supports_complex() { "yes" } else { "no" },
            if spec.has_sampler() { "yes" } else { "no" },
        );
    }
    println!("\nverification cases: {}", CASE_NAMES.join(", "));
    Ok(())
}

// --- deconvolve ---------------------------------------------------------------

fn cmd_deconvolve(args: &DeconvolveArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)?;
    let job: JobConfig = serde_json::from_str(&text)?;
    let mut problem = DeconvolutionProblem {
        z_spec: job.z_spec,
        y_spec: job.y_spec,
        grid: job.grid,
        inversion: job.inversion,
    };
    if let Some(cfg) = args.inversion.build() {
        problem.inversion = cfg;
    }
    log::info!(
        "deconvolving Z = {} against Y = {} ({})",
        problem.z_spec.family(),
        problem.y_spec.family(),
        problem.inversion.describe()
    );
    let grid = deconvolve(&problem)?;

    let csv_path = args.out.clone().unwrap_or(job.outputs.grid_csv);
    fs::write(&csv_path, grid.to_csv())?;
    let diag_path =
        job.outputs.diagnostics_json.unwrap_or_else(|| diagnostics_path(&csv_path));
    fs::write(&diag_path, serde_json::to_string_pretty(&grid.diagnostics)?)?;
    println!(
        "wrote {} ({} points, grid mass {:.6}, {} clamped) and {}",
        csv_path.display(),
        grid.len(),
        grid.diagnostics.mass,
        grid.diagnostics.clamped_count,
        diag_path.display()
    );
    Ok(())
}

// --- verify -------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let cfg = args.inversion.build();

    if args.negative_control {
        let report = verify::negative_control(args.mc, args.seed)?;
        println!("{}", summary_header());
        println!("{}", report.summary_row());
        for f in &report.failures {
            println!("  {}: {f}", report.case);
        }
        let summary =
            VerifySummary { all_passed: report.passed, reports: vec![report], moment_checks: None };
        fs::write(&args.out, serde_json::to_string_pretty(&summary)?)?;
        return Ok(exit_for(summary.all_passed));
    }

    let names: Vec<&str> = if args.all {
        CASE_NAMES.to_vec()
    } else if args.cases.is_empty() {
        return Err(Error::Config("give one or more case names, or --all".into()));
    } else {
        args.cases.iter().map(String::as_str).collect()
    };

    let mut reports = Vec::with_capacity(names.len());
    println!("{}", summary_header());
    for name in names {
        log::info!("verifying case {name}");
        let report = verify::run_case(name, cfg.clone(), args.mc, args.seed)?;
        println!("{}", report.summary_row());
        for f in &report.failures {
            println!("  {name}: {f}");
        }
        reports.push(report);
    }

    let moment_checks = if args.all {
        let checks = verify::moment_comparison()?;
        let agreeing = checks.iter().filter(|c| c.agrees).count();
        println!("moment-formula audit: {agreeing}/{} points agree with quadrature", checks.len());
        Some(checks)
    } else {
        None
    };

    let all_passed = reports.iter().all(|r| r.passed);
    let summary = VerifySummary { reports, moment_checks, all_passed };
    fs::write(&args.out, serde_json::to_string_pretty(&summary)?)?;
    println!("summary written to {}", args.out.display());
    Ok(exit_for(all_passed))
}

fn exit_for(all_passed: bool) -> ExitCode {
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
