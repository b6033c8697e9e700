//! The verification harness: mass conservation, closed-form agreement,
//! forward consistency, and Monte Carlo closure, composed per case into a
//! serializable report.
//!
//! Four independent instruments, in rising order of bluntness:
//!
//! * [`check_normalization`] — does the recovered grid carry unit mass?
//! * [`compare_to_oracle`] — pointwise relative error against the exact
//!   answer, restricted to the oracle's central-mass window where relative
//!   error means something;
//! * [`check_forward`] — push the recovery through the forward ratio
//!   operator and compare against the known ratio density, a check that
//!   works even without a closed form;
//! * [`ks_statistic`] — draw the parent pair, form the ratio, and test the
//!   samples against the ratio law (`Monte Carlo closure`).
//!
//! [`run_case`] wires them together for a registry case and returns a
//! [`VerificationReport`]; reports are deterministic given (case, config,
//! seed). [`negative_control`] runs the deliberately corrupted beta–gamma
//! case that the suite must flag as a failure — the harness's own smoke
//! test. [`moment_comparison`] records the weighted-Lindley ratio moment
//! formula against direct quadrature without adjudicating it.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::{self, OracleCase};
use crate::deconv::{deconvolve, forward_density, DensityGrid};
use crate::dist::{ratio_moment_t, DistributionSpec};
use crate::error::{Error, Result};
use crate::laplace::{InversionConfig, Pchip};
use crate::quad;
use crate::special::{gamma, reg_inc_gamma_lower};

/// Absolute budget for the forward-consistency residual on numeric output.
pub const FORWARD_TOLERANCE: f64 = 1e-3;
/// Asymptotic 99% Kolmogorov–Smirnov band constant: pass is `D < 1.63/√n`.
pub const KS_BAND: f64 = 1.63;

/// The 19 standard probe points `0.05, 0.10, …, 0.95`.
pub fn standard_z_points() -> Vec<f64> {
    (1..=19).map(|i| f64::from(i) / 20.0).collect()
}

// --- the four instruments -------------------------------------------------

/// `|∫ f − 1|` for a recovered grid: the interpolant's integral over the
/// grid window, plus a fitted head below the first point, plus a fitted
/// exponential tail beyond the last.
///
/// The head fits `c·x^k·e^{−ηx}` through the first three points (the shape
/// every catalog density takes at the origin) and integrates it from 0;
/// the tail fits a pure exponential through the last two positive points.
/// Grids that start or end at zero get no head/tail credit — a grid of all
/// zeros reports exactly 1.
pub fn check_normalization(grid: &DensityGrid) -> f64 {
    let mass = grid.diagnostics.mass + head_mass(grid) + tail_mass(grid);
    (mass - 1.0).abs()
}

fn head_mass(grid: &DensityGrid) -> f64 {
    let (x, f) = (grid.abscissae(), grid.values());
    if f.len() < 3 || f[..3].iter().any(|v| *v <= 0.0) {
        return 0.0;
    }
    // ln f = a + k·ln x − ηx through the first three points
    let w: Vec<f64> = f[..3].iter().map(|v| v.ln()).collect();
    let u: Vec<f64> = x[..3].iter().map(|v| v.ln()).collect();
    let (du1, du2) = (u[1] - u[0], u[2] - u[1]);
    let (dx1, dx2) = (x[1] - x[0], x[2] - x[1]);
    let det = -du1 * dx2 + du2 * dx1;
    if det == 0.0 {
        return 0.0;
    }
    let k = (-(w[1] - w[0]) * dx2 + (w[2] - w[1]) * dx1) / det;
    let eta = (du1 * (w[2] - w[1]) - du2 * (w[1] - w[0])) / det;
    if k <= -0.999 {
        // not integrably small at the origin as fitted; claim nothing
        return 0.0;
    }
    if eta * x[0] < 1e-8 {
        // exponent indistinguishable from (or favoring) flat at this scale
        return f[0] * x[0] / (k + 1.0);
    }
    let a = w[0] - k * u[0] + eta * x[0];
    match (gamma(k + 1.0), reg_inc_gamma_lower(k + 1.0, eta * x[0])) {
        (Ok(g), Ok(p)) => a.exp() * g * p / eta.powf(k + 1.0),
        _ => 0.0,
    }
}

fn tail_mass(grid: &DensityGrid) -> f64 {
    let (x, f) = (grid.abscissae(), grid.values());
    let n = f.len();
    if n < 2 || f[n - 1] <= 0.0 || f[n - 2] <= 0.0 {
        return 0.0;
    }
    let eta = (f[n - 2] / f[n - 1]).ln() / (x[n - 1] - x[n - 2]);
    if eta > 0.0 {
        f[n - 1] / eta
    } else {
        0.0
    }
}

/// Max relative error of the grid against the case's closed form, over
/// the grid points inside the oracle's central `mass_fraction` window.
///
/// The window is found on the oracle's own cumulative (trapezoid over the
/// grid abscissae): it opens at the first point where the cumulative
/// reaches `(1−mass_fraction)/2` of the grid total and closes at the first
/// point reaching `(1+mass_fraction)/2`. Points where the oracle vanishes
/// are skipped — relative error is meaningless there.
pub fn compare_to_oracle(grid: &DensityGrid, oracle: &OracleCase, mass_fraction: f64) -> Result<f64> {
    if !(mass_fraction > 0.0 && mass_fraction < 1.0) {
        return Err(Error::Config(format!(
            "mass_fraction must lie in (0,1), got {mass_fraction}"
        )));
    }
    let xs = grid.abscissae();
    let reference: Vec<f64> = xs.iter().map(|&x| oracle.density(x)).collect::<Result<_>>()?;
    let mut cum = vec![0.0; xs.len()];
    for i in 1..xs.len() {
        cum[i] = cum[i - 1] + 0.5 * (reference[i] + reference[i - 1]) * (xs[i] - xs[i - 1]);
    }
    let total = *cum.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::Config(format!(
            "oracle '{}' carries no mass on the grid [{:.3e}, {:.3e}]",
            oracle.name,
            xs[0],
            xs[xs.len() - 1]
        )));
    }
    let lo_level = 0.5 * (1.0 - mass_fraction) * total;
    let hi_level = 0.5 * (1.0 + mass_fraction) * total;
    let lo = cum.iter().position(|&c| c >= lo_level).unwrap();
    let hi = cum.iter().position(|&c| c >= hi_level).unwrap();
    if lo > hi {
        return Err(Error::Config("empty central-mass comparison region".into()));
    }
    let mut worst: f64 = 0.0;
    for i in lo..=hi {
        if reference[i] > 0.0 {
            worst = worst.max((grid.values()[i] - reference[i]).abs() / reference[i]);
        }
    }
    Ok(worst)
}

/// Max over `z_points` of |forward ratio density from the grid − the
/// stated ratio density|. Probe points must stay inside `[0.05, 0.95]`,
/// away from the endpoint regimes the forward quadrature is not meant for.
pub fn check_forward(
    grid: &DensityGrid,
    y_spec: &DistributionSpec,
    z_spec: &DistributionSpec,
    z_points: &[f64],
) -> Result<f64> {
    if z_points.is_empty() {
        return Err(Error::Config("check_forward needs at least one probe point".into()));
    }
    if let Some(bad) = z_points.iter().find(|z| !(0.05..=0.95).contains(*z)) {
        return Err(Error::Config(format!(
            "forward probe points must lie in [0.05, 0.95], got {bad}"
        )));
    }
    let mut worst: f64 = 0.0;
    for &z in z_points {
        let fwd = forward_density(grid, y_spec, z)?;
        worst = worst.max((fwd - z_spec.pdf(z)?).abs());
    }
    Ok(worst)
}

/// Two-sided Kolmogorov–Smirnov statistic of sorted samples against a CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Config("ks_statistic needs a non-empty sample".into()));
    }
    if samples.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("ks_statistic requires samples sorted ascending".into()));
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

// --- per-case composition --------------------------------------------------

/// Outcome of the Monte Carlo closure leg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub n: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Everything measured about one case, one configuration, one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: String,
    pub method: String,
    pub seed: u64,
    pub grid_points: usize,
    pub clamped_count: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub mass_residual: f64,
    pub mass_tolerance: f64,
    /// `None` when the forward operator refused the grid (coverage); the
    /// refusal is recorded in `failures`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forward_residual: Option<f64>,
    pub forward_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mc: Option<McCheck>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    /// One fixed-width summary row (pair with [`summary_header`]).
    pub fn summary_row(&self) -> String {
        let mc = match &self.mc {
            Some(m) => format!("{:.2e}", m.statistic),
            None => "-".into(),
        };
        let forward = match self.forward_residual {
            Some(r) => format!("{r:.2e}"),
            None => "-".into(),
        };
        format!(
            "{:<17} {:<14} {:>9.2e} {:>9.2e} {:>9} {:>9} {:>6}",
            self.case,
            self.method,
            self.max_rel_err,
            self.mass_residual,
            forward,
            mc,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Header matching [`VerificationReport::summary_row`].
pub fn summary_header() -> String {
    format!(
        "{:<17} {:<14} {:>9} {:>9} {:>9} {:>9} {:>6}",
        "case", "method", "rel-err", "mass", "forward", "ks", "status"
    )
}

/// Run every check for a registry case. `cfg = None` uses the case's own
/// tuned inversion settings; the Monte Carlo leg runs only when `n_mc > 0`
/// and both parents (the recovered family and `Y`) have samplers.
pub fn run_case(
    name: &str,
    cfg: Option<InversionConfig>,
    n_mc: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let case = closed_form::case(name)?;
    run_oracle_case(&case, cfg, n_mc, seed)
}

/// [`run_case`] for a caller-supplied case — the entry point for negative
/// controls and non-canonical parameterizations.
pub fn run_oracle_case(
    case: &OracleCase,
    cfg: Option<InversionConfig>,
    n_mc: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut prob = case.problem();
    if let Some(cfg) = cfg {
        prob.inversion = cfg;
    }
    let grid = deconvolve(&prob)?;
    let mut failures = Vec::new();

    let max_rel_err = compare_to_oracle(&grid, case, 0.9)?;
    let mass_residual = check_normalization(&grid);
    // a grid the forward operator refuses (too much recovered mass beyond
    // its edge) is itself a verification failure, not a harness fault
    let forward_residual =
        match check_forward(&grid, &case.y_spec, &case.z_spec, &standard_z_points()) {
            Ok(r) => Some(r),
            Err(Error::Coverage { outside_mass, limit }) => {
                failures.push(format!(
                    "forward check refused: estimated {outside_mass:.3e} of the recovered \
                     mass lies beyond the grid (limit {limit:.1e})"
                ));
                None
            }
            Err(e) => return Err(e),
        };
    let mc = match &case.x_spec {
        Some(x_spec) if n_mc > 0 && x_spec.has_sampler() && case.y_spec.has_sampler() => {
            Some(mc_closure(x_spec, &case.y_spec, &case.z_spec, n_mc, seed)?)
        }
        _ => None,
    };

    if !(max_rel_err <= case.tolerance) {
        failures.push(format!("max rel err {max_rel_err:.3e} exceeds {:.1e}", case.tolerance));
    }
    if !(mass_residual <= case.mass_tolerance) {
        failures.push(format!(
            "mass residual {mass_residual:.3e} exceeds {:.1e}",
            case.mass_tolerance
        ));
    }
    if let Some(r) = forward_residual {
        if !(r <= FORWARD_TOLERANCE) {
            failures.push(format!("forward residual {r:.3e} exceeds {FORWARD_TOLERANCE:.1e}"));
        }
    }
    if grid.diagnostics.clamped_count * 100 >= grid.len() {
        failures.push(format!(
            "{} of {} grid points clamped to zero",
            grid.diagnostics.clamped_count,
            grid.len()
        ));
    }
    if let Some(mc) = &mc {
        if !mc.passed {
            failures.push(format!(
                "KS statistic {:.3e} exceeds the 99% band {:.3e}",
                mc.statistic, mc.threshold
            ));
        }
    }

    Ok(VerificationReport {
        case: case.name.to_string(),
        method: prob.inversion.describe(),
        seed,
        grid_points: grid.len(),
        clamped_count: grid.diagnostics.clamped_count,
        max_rel_err,
        tolerance: case.tolerance,
        mass_residual,
        mass_tolerance: case.mass_tolerance,
        forward_residual,
        forward_tolerance: FORWARD_TOLERANCE,
        mc,
        passed: failures.is_empty(),
        failures,
    })
}

/// Draw the parent pair, form `X/(X+Y)`, and KS-test against the ratio
/// law at the asymptotic 99% level.
fn mc_closure(
    x_spec: &DistributionSpec,
    y_spec: &DistributionSpec,
    z_spec: &DistributionSpec,
    n: usize,
    seed: u64,
) -> Result<McCheck> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        let x = x_spec.sample(&mut rng)?;
        let y = y_spec.sample(&mut rng)?;
        z.push(x / (x + y));
    }
    z.sort_by(f64::total_cmp);
    // the gbp ratio law's CDF falls back to per-point quadrature — far too
    // slow for 10⁵ evaluations — so it is tabulated once and interpolated
    // (the interpolation error is orders below the KS band)
    let statistic = if matches!(z_spec, DistributionSpec::GbpRatio { .. }) {
        let knots: Vec<f64> = (0..=2000).map(|i| 1e-9 + (1.0 - 2e-9) * i as f64 / 2000.0).collect();
        let values = knots.iter().map(|&t| z_spec.cdf(t)).collect::<Result<Vec<_>>>()?;
        let interp = Pchip::new(knots, values)?;
        ks_statistic(&z, |t| Ok(interp.eval(t)))?
    } else {
        ks_statistic(&z, |t| z_spec.cdf(t))?
    };
    let threshold = KS_BAND / (n as f64).sqrt();
    Ok(McCheck { n, statistic, threshold, passed: statistic < threshold })
}

/// The corrupted beta–gamma case: ratio-law shapes swapped, oracle left
/// alone. The pipeline then faithfully recovers the *wrong* density, and
/// the report must fail on the oracle comparison.
pub fn negative_control(n_mc: usize, seed: u64) -> Result<VerificationReport> {
    let mut case = closed_form::case("beta-gamma")?;
    let DistributionSpec::Beta { alpha, beta } = case.z_spec else {
        return Err(Error::Config("beta-gamma case no longer has a Beta ratio law".into()));
    };
    case.z_spec = DistributionSpec::Beta { alpha: beta, beta: alpha };
    run_oracle_case(&case, None, n_mc, seed)
}

// --- moment-formula audit ---------------------------------------------------

/// One recorded comparison of the ratio-moment closed form against
/// quadrature; `agrees` applies the stated relative gate, nothing is
/// adjusted either way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub c: f64,
    pub beta: f64,
    pub lambda: f64,
    pub j: u8,
    pub r: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub rel_gap: f64,
    pub agrees: bool,
}

/// Audit [`ratio_moment_t`] against direct quadrature of `E[(1+L)^{−r}]`
/// for `L ~ Lomax(c+j, β/λ)` on ten fixed parameter points. The formula is
/// coded exactly as stated and is suspected not to hold; this records the
/// outcome rather than resolving it.
pub fn moment_comparison() -> Result<Vec<MomentCheck>> {
    const POINTS: [(f64, f64, f64, u8, f64); 10] = [
        (2.0, 1.0, 1.0, 0, 1.0),
        (2.0, 1.0, 1.0, 1, 2.0),
        (3.0, 2.0, 1.0, 0, 1.0),
        (1.5, 0.5, 2.0, 1, 1.0),
        (1.0, 1.0, 1.0, 0, 0.0),
        (2.0, 2.0, 2.0, 0, 1.0),
        (2.5, 1.0, 2.0, 1, 0.0),
        (4.0, 3.0, 1.0, 0, 2.0),
        (1.0, 2.0, 3.0, 1, 1.0),
        (3.0, 1.0, 1.0, 1, 3.0),
    ];
    POINTS
        .iter()
        .map(|&(c, beta, lambda, j, r)| {
            let closed_form = ratio_moment_t(c, beta, lambda, j, r)?;
            let shape = c + f64::from(j);
            let scale = beta / lambda;
            // E[(1+L)^{−r}] by quadrature of the Lomax density
            let quadrature = quad::integrate_semi_inf(
                |l| (1.0 + l).powf(-r) * shape / scale * (1.0 + l / scale).powf(-shape - 1.0),
                0.0,
                1e-11,
                1e-14,
            )?;
            let rel_gap = (closed_form - quadrature).abs() / quadrature.abs().max(f64::MIN_POSITIVE);
            Ok(MomentCheck {
                c,
                beta,
                lambda,
                j,
                r,
                closed_form,
                quadrature,
                rel_gap,
                agrees: rel_gap < 1e-6,
            })
        })
        .collect()
}
