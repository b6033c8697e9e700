//! Numerical inverse Laplace transforms.
//!
//! Two engines with complementary demands on the transform:
//!
//! | engine           | nodes            | needs                  | typical accuracy |
//! |------------------|------------------|------------------------|------------------|
//! | [`gaver`]        | positive reals   | real evaluation        | ~1e-8 (order 14) |
//! | [`talbot`]       | complex contour  | analytic continuation  | ~1e-12 (32 pts)  |
//!
//! plus the [`iterated`] double inversion that realizes the generalized
//! Stieltjes inverse `G_p^{-1}{Ψ}(x) = Γ(p)·ℒ⁻¹{t^{1-p}ℒ⁻¹{Ψ}(t)}(x)`,
//! and quadrature [`forward`] transforms serving as round-trip oracles.
//!
//! [`InversionConfig`] selects and parameterizes a method; callers hand
//! any [`TransformFn`] to [`invert`], which dispatches and enforces the
//! real/complex capability contract.

pub mod forward;
pub mod gaver;
pub mod interp;
pub mod iterated;
pub mod talbot;

pub use forward::{forward_laplace, forward_laplace_complex};
pub use gaver::{invert_gaver_stehfest, stehfest_weights};
pub use interp::Pchip;
pub use iterated::{invert_iterated, IteratedInverter};
pub use talbot::{invert_talbot, talbot_nodes};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Laplace transform presented for inversion. The real path serves
/// Gaver–Stehfest; the complex path (when available) serves Talbot.
pub trait TransformFn {
    fn eval_real(&self, s: f64) -> Result<f64>;
    fn eval_complex(&self, s: Complex64) -> Result<Complex64>;
    /// Whether `eval_complex` is usable (analytic continuation exists).
    fn has_complex(&self) -> bool;
}

/// Transform known only on the positive real axis.
pub struct RealFn<F>(pub F);

impl<F: Fn(f64) -> Result<f64>> TransformFn for RealFn<F> {
    fn eval_real(&self, s: f64) -> Result<f64> {
        (self.0)(s)
    }

    fn eval_complex(&self, _: Complex64) -> Result<Complex64> {
        Err(Error::Capability(
            "this transform is only evaluable on the real axis; use gaver-stehfest".into(),
        ))
    }

    fn has_complex(&self) -> bool {
        false
    }
}

/// Analytic transform given by one complex-valued function; the real path
/// evaluates it on the axis.
pub struct AnalyticFn<F>(pub F);

impl<F: Fn(Complex64) -> Result<Complex64>> TransformFn for AnalyticFn<F> {
    fn eval_real(&self, s: f64) -> Result<f64> {
        Ok((self.0)(Complex64::new(s, 0.0))?.re)
    }

    fn eval_complex(&self, s: Complex64) -> Result<Complex64> {
        (self.0)(s)
    }

    fn has_complex(&self) -> bool {
        true
    }
}

/// Analytic transform with a separate (typically cheaper or more stable)
/// real-axis evaluation.
pub struct DualFn<Fr, Fc> {
    pub real: Fr,
    pub complex: Fc,
}

impl<Fr, Fc> TransformFn for DualFn<Fr, Fc>
where
    Fr: Fn(f64) -> Result<f64>,
    Fc: Fn(Complex64) -> Result<Complex64>,
{
    fn eval_real(&self, s: f64) -> Result<f64> {
        (self.real)(s)
    }

    fn eval_complex(&self, s: Complex64) -> Result<Complex64> {
        (self.complex)(s)
    }

    fn has_complex(&self) -> bool {
        true
    }
}

fn default_order() -> usize {
    gaver::DEFAULT_ORDER
}

fn default_nodes() -> usize {
    talbot::DEFAULT_NODES
}

fn default_contour_scale() -> f64 {
    talbot::DEFAULT_CONTOUR_SCALE
}

/// The inversion engine selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    GaverStehfest {
        #[serde(default = "default_order")]
        order: usize,
    },
    Talbot {
        #[serde(default = "default_nodes")]
        nodes: usize,
        #[serde(default = "default_contour_scale")]
        contour_scale: f64,
    },
}

/// Log-spaced grid for the inner-function cache of the double inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

/// Method plus the optional nested configuration for double inversion.
///
/// JSON shape: `{"method":"gaver-stehfest","order":14}` or
/// `{"method":"talbot","nodes":32,"contour_scale":1.0}`, optionally with
/// `"inner":{...}` (same shape) and `"interp_grid":{"t_min":…,"t_max":…,"count":…}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    #[serde(flatten)]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<InversionConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interp_grid: Option<InterpGridSpec>,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig::gaver_stehfest(gaver::DEFAULT_ORDER)
    }
}

impl InversionConfig {
    pub fn gaver_stehfest(order: usize) -> Self {
        InversionConfig { method: Method::GaverStehfest { order }, inner: None, interp_grid: None }
    }

    pub fn talbot(nodes: usize) -> Self {
        InversionConfig {
            method: Method::Talbot { nodes, contour_scale: talbot::DEFAULT_CONTOUR_SCALE },
            inner: None,
            interp_grid: None,
        }
    }

    pub fn with_inner(mut self, inner: InversionConfig) -> Self {
        self.inner = Some(Box::new(inner));
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::GaverStehfest { order } => {
                if order % 2 != 0 || !(gaver::MIN_ORDER..=gaver::MAX_ORDER).contains(&order) {
                    return Err(Error::Config(format!(
                        "gaver-stehfest order must be even and in [{}, {}], got {order}",
                        gaver::MIN_ORDER,
                        gaver::MAX_ORDER
                    )));
                }
            }
            Method::Talbot { nodes, contour_scale } => {
                if nodes < talbot::MIN_NODES {
                    return Err(Error::Config(format!(
                        "talbot needs at least {} nodes, got {nodes}",
                        talbot::MIN_NODES
                    )));
                }
                if !(contour_scale > 0.0 && contour_scale.is_finite()) {
                    return Err(Error::Config(format!(
                        "talbot contour_scale must be positive, got {contour_scale}"
                    )));
                }
            }
        }
        if let Some(grid) = &self.interp_grid {
            if !(grid.t_min > 0.0 && grid.t_max > grid.t_min && grid.t_max.is_finite()) {
                return Err(Error::Config(format!(
                    "interp_grid needs 0 < t_min < t_max, got [{}, {}]",
                    grid.t_min, grid.t_max
                )));
            }
            if grid.count < 10 {
                return Err(Error::Config(format!(
                    "interp_grid needs at least 10 points, got {}",
                    grid.count
                )));
            }
        }
        if let Some(inner) = &self.inner {
            inner.validate()?;
        }
        Ok(())
    }

    /// Short human-readable form for diagnostics and log lines.
    pub fn describe(&self) -> String {
        let head = match self.method {
            Method::GaverStehfest { order } => format!("gaver-stehfest(order {order})"),
            Method::Talbot { nodes, .. } => format!("talbot({nodes} nodes)"),
        };
        match &self.inner {
            Some(inner) => format!("{head} over inner {}", inner.describe()),
            None => head,
        }
    }
}

/// Invert `f` at `t` with the configured engine.
pub fn invert<T: TransformFn + ?Sized>(f: &T, t: f64, cfg: &InversionConfig) -> Result<f64> {
    cfg.validate()?;
    match cfg.method {
        Method::GaverStehfest { order } => {
            gaver::invert_gaver_stehfest(|s| f.eval_real(s), t, order)
        }
        Method::Talbot { nodes, contour_scale } => {
            if !f.has_complex() {
                return Err(Error::Capability(
                    "talbot evaluates the transform at complex contour points, but this \
                     transform is only defined on the real axis; use gaver-stehfest instead"
                        .into(),
                ));
            }
            talbot::invert_talbot(|s| f.eval_complex(s), t, nodes, contour_scale)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, hyp1f1, SeriesControl};
    use approx::assert_relative_eq;

    #[test]
    fn config_serializes_to_the_documented_shape() {
        let cfg = InversionConfig::gaver_stehfest(14);
        assert_eq!(serde_json::to_string(&cfg).unwrap(), r#"{"method":"gaver-stehfest","order":14}"#);

        let cfg = InversionConfig::talbot(32);
        assert_eq!(
            serde_json::to_string(&cfg).unwrap(),
            r#"{"method":"talbot","nodes":32,"contour_scale":1.0}"#
        );

        let nested: InversionConfig = serde_json::from_str(
            r#"{"method":"gaver-stehfest","order":12,
                "inner":{"method":"talbot"},
                "interp_grid":{"t_min":0.01,"t_max":100.0,"count":400}}"#,
        )
        .unwrap();
        assert_eq!(nested.method, Method::GaverStehfest { order: 12 });
        assert_eq!(
            nested.inner.as_deref().unwrap().method,
            Method::Talbot { nodes: 32, contour_scale: 1.0 }
        );
        assert_eq!(nested.interp_grid.unwrap().count, 400);
        let back = serde_json::to_string(&nested).unwrap();
        assert_eq!(serde_json::from_str::<InversionConfig>(&back).unwrap(), nested);
    }

    #[test]
    fn defaults_fill_in_when_fields_are_omitted() {
        let cfg: InversionConfig = serde_json::from_str(r#"{"method":"gaver-stehfest"}"#).unwrap();
        assert_eq!(cfg.method, Method::GaverStehfest { order: 14 });
        let cfg: InversionConfig = serde_json::from_str(r#"{"method":"talbot"}"#).unwrap();
        assert_eq!(cfg.method, Method::Talbot { nodes: 32, contour_scale: 1.0 });
    }

    #[test]
    fn validation_bounds_are_enforced() {
        assert!(InversionConfig::gaver_stehfest(20).validate().is_err());
        assert!(InversionConfig::gaver_stehfest(13).validate().is_err());
        assert!(InversionConfig::talbot(4).validate().is_err());
        let mut cfg = InversionConfig::talbot(32);
        cfg.interp_grid = Some(InterpGridSpec { t_min: 1.0, t_max: 0.5, count: 100 });
        assert!(cfg.validate().is_err());
        let bad_inner = InversionConfig::gaver_stehfest(14)
            .with_inner(InversionConfig::gaver_stehfest(99));
        assert!(bad_inner.validate().is_err());
    }

    #[test]
    fn talbot_on_a_real_only_transform_is_a_capability_error() {
        let f = RealFn(|s: f64| Ok(1.0 / s));
        let err = invert(&f, 1.0, &InversionConfig::talbot(32)).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
    }

    #[test]
    fn both_methods_round_trip_smooth_decaying_functions() {
        // forward transform by quadrature, then invert. Gaver–Stehfest is
        // checked only up to t = 2: its absolute noise sits near 1e-8 of
        // the function's peak scale, so relative accuracy decays as the
        // value does (at t = 10, e^{-t} ~ 5e-5 is already below it).
        let cases: [(fn(f64) -> f64, fn(Complex64) -> Complex64); 2] = [
            (|t| (-t).exp(), |t| (-t).exp()),
            (|t| t * (-t).exp(), |t| t * (-t).exp()),
        ];
        for (g_real, g_cplx) in cases {
            for t in [0.1, 0.7, 2.0, 10.0] {
                let want = g_real(t);
                if t <= 2.0 {
                    let gs = invert(
                        &RealFn(|s| forward_laplace(g_real, s)),
                        t,
                        &InversionConfig::gaver_stehfest(14),
                    )
                    .unwrap();
                    assert_relative_eq!(gs, want, max_relative = 1e-3);
                }
                let tb = invert(
                    &AnalyticFn(|s| forward_laplace_complex(|z| Ok(g_cplx(z)), s, 1.0)),
                    t,
                    &InversionConfig::talbot(32),
                )
                .unwrap();
                assert_relative_eq!(tb, want, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
    }

    /// `ℒ⁻¹{s^a/(1+s)^b}(t) = t^{b-a-1}·₁F₁(b; b−a; −t)/Γ(b−a)`.
    fn confluent_side(a: f64, b: f64, t: f64) -> f64 {
        let ctrl = SeriesControl::default();
        t.powf(b - a - 1.0) * hyp1f1(b, b - a, -t, &ctrl).unwrap() / gamma(b - a).unwrap()
    }

    #[test]
    fn power_over_shifted_power_inverts_to_confluent_form() {
        for (a, b) in [(0.0, 1.0), (0.5, 2.0), (1.0, 3.0), (2.0, 5.5)] {
            for t in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
                let f = AnalyticFn(move |s: Complex64| Ok(s.powf(a) / (1.0 + s).powf(b)));
                let got = invert(&f, t, &InversionConfig::talbot(32)).unwrap();
                let want = confluent_side(a, b, t);
                // epsilon covers the exact zero of ₁F₁(3;2;−t) at t = 2;
                // talbot's absolute floor there measures ~2e-12
                assert_relative_eq!(got, want, max_relative = 1e-6, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn confluent_form_degenerates_to_gamma_density_at_a_zero() {
        // ₁F₁(b;b;−t) = e^{−t}, so the a = 0 row must equal t^{b-1}e^{-t}/Γ(b)
        for b in [1.0, 2.5, 4.0] {
            for t in [0.1, 1.0, 3.0, 10.0] {
                let lhs = confluent_side(0.0, b, t);
                let rhs = t.powf(b - 1.0) * (-t).exp() / gamma(b).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn methods_agree_on_analytic_transforms() {
        // √s has a branch point at 0; gaver-stehfest truncation there is
        // the gap (measured up to ~6e-4), talbot is near machine accuracy
        for t in [0.2, 1.0, 4.0] {
            let f = AnalyticFn(|s: Complex64| Ok(s.powf(0.5) / ((1.0 + s) * (1.0 + s))));
            let gs = invert(&f, t, &InversionConfig::gaver_stehfest(14)).unwrap();
            let tb = invert(&f, t, &InversionConfig::talbot(32)).unwrap();
            assert_relative_eq!(gs, tb, max_relative = 2e-3);
        }
    }

    #[test]
    fn derivative_property_holds_for_vanishing_initial_value() {
        // ℒ{g'}(s) = s·ℒ{g}(s) when g(0) = 0; checked both as a transform
        // identity and through an inversion of s·ℒ{g}
        let g = |t: Complex64| Ok(t * t * (-t).exp());
        let gp = |t: Complex64| Ok((2.0 * t - t * t) * (-t).exp());
        for s in [Complex64::new(0.8, 0.0), Complex64::new(0.5, 1.2)] {
            let lg = forward_laplace_complex(g, s, 1.0).unwrap();
            let lgp = forward_laplace_complex(gp, s, 1.0).unwrap();
            assert!((lgp - s * lg).norm() < 1e-12, "s = {s}");
        }
        let g_real = |t: f64| t * t * (-t).exp();
        // g' changes sign at t = 2; gaver-stehfest converges slowly near
        // the crossing, so the point beyond it gets a wider bound
        for (t, tol) in [(0.5, 1e-3), (1.0, 1e-3), (3.0, 1e-2)] {
            let f = RealFn(move |s: f64| Ok(s * forward_laplace(g_real, s)?));
            let got = invert(&f, t, &InversionConfig::gaver_stehfest(14)).unwrap();
            let want = (2.0 * t - t * t) * (-t).exp();
            assert_relative_eq!(got, want, max_relative = tol, epsilon = 1e-8);
        }
    }
}
