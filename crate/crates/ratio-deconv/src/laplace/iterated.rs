//! Iterated (double) inverse Laplace transform.
//!
//! Realizes the generalized Stieltjes inverse: if `Ψ = G_p{f}` with
//! `G_p{f}(s) = ∫₀^∞ f(u)(s+u)^{-p} du`, then
//!
//! ```text
//! f(x) = Γ(p) · ℒ⁻¹{ t^{1-p} · ℒ⁻¹{Ψ}(t) }(x)
//! ```
//!
//! (the factor `Γ(p)` is left to the caller, matching the recovery
//! formulas that absorb it into their prefactors).
//!
//! The outer inversion always runs Gaver–Stehfest: its nodes are real, so
//! the inner inverse — known only as a numeric curve — never has to be
//! continued off the axis.
//!
//! # Error amplification and the choice of cache knots
//!
//! The outer Gaver–Stehfest sum multiplies the inner curve by weights
//! whose absolute sum grows fast with the order (about 5·10⁴ at order 8,
//! 1.3·10⁶ at order 10, 6.5·10⁸ at order 14). Any component of the inner
//! values that is not smooth *at the outer-node spacing* — inversion
//! noise, or an interpolant's sawtooth — is amplified by roughly that
//! factor. Two practical consequences:
//!
//! * the inner inverse is cached **at the exact outer nodes** `k·ln2/x`
//!   by default, so interpolation contributes nothing at the points the
//!   outer sum actually reads;
//! * both passes should run at moderate orders (8–12). Cranking either
//!   order up amplifies double-precision noise faster than it reduces
//!   truncation error, and the result degrades rather than improves.
//!
//! An explicit `interp_grid` in the config replaces the node-union cache
//! with a log-spaced one (built once, then shared), trading accuracy for
//! a cheaper precompute when many evaluation points are needed; the
//! interpolant is a monotone cubic either way, fitted in log–log when the
//! curve is strictly positive.

use super::gaver::{invert_gaver_stehfest, stehfest_weights};
use super::interp::Pchip;
use super::{invert, InversionConfig, Method, TransformFn};
use crate::error::{Error, Result};

enum CachedCurve {
    Direct(Pchip),
    LogLog(Pchip),
}

impl CachedCurve {
    fn eval(&self, t: f64) -> f64 {
        match self {
            CachedCurve::Direct(p) => p.eval(t),
            CachedCurve::LogLog(p) => p.eval(t.ln()).exp(),
        }
    }
}

/// Double inversion with the inner pass precomputed, reusable across the
/// evaluation points it was built for.
pub struct IteratedInverter {
    p: f64,
    outer_order: usize,
    cache: CachedCurve,
}

impl IteratedInverter {
    /// Precompute the inner inversion so that `eval` works at every point
    /// in `points`.
    ///
    /// Without an `interp_grid` in the config, the cache knots are the
    /// sorted union of the outer Gaver–Stehfest nodes `k·ln2/x` over all
    /// requested points, so the outer sums read exact inner values. With
    /// an `interp_grid`, the knots are `count` log-spaced points on
    /// `[t_min, t_max]` and outer nodes are interpolated (and clamped if
    /// outside that span).
    pub fn new<T: TransformFn + ?Sized>(
        f: &T,
        p: f64,
        cfg: &InversionConfig,
        points: &[f64],
    ) -> Result<Self> {
        cfg.validate()?;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::domain("invert_iterated", format!("p must be positive, got {p}")));
        }
        if points.is_empty() {
            return Err(Error::domain("invert_iterated", "no evaluation points given"));
        }
        if let Some(&bad) = points.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::domain(
                "invert_iterated",
                format!("evaluation points must be positive and finite, got {bad}"),
            ));
        }
        let outer_order = match cfg.method {
            Method::GaverStehfest { order } => order,
            Method::Talbot { .. } => {
                return Err(Error::Capability(
                    "the outer pass of the iterated inversion runs on real nodes \
                     (gaver-stehfest); talbot cannot drive it because the inner inverse \
                     is a numeric curve with no complex continuation"
                        .into(),
                ))
            }
        };
        let inner_cfg = cfg.inner.as_deref().ok_or_else(|| {
            Error::Config(
                "iterated inversion requires an inner method; set \"inner\" in the \
                 inversion config"
                    .into(),
            )
        })?;

        let ln2 = std::f64::consts::LN_2;
        let ts = match cfg.interp_grid {
            Some(grid) => {
                let n = grid.count.max(10);
                let ratio = grid.t_max / grid.t_min;
                (0..n)
                    .map(|i| grid.t_min * ratio.powf(i as f64 / (n - 1) as f64))
                    .collect::<Vec<_>>()
            }
            None => {
                let mut nodes = Vec::with_capacity(points.len() * outer_order);
                for &x in points {
                    for k in 1..=outer_order {
                        nodes.push(k as f64 * ln2 / x);
                    }
                }
                nodes.sort_by(|a, b| a.total_cmp(b));
                // collapse near-coincident nodes (k/x ratios collide easily
                // on log-spaced point sets)
                nodes.dedup_by(|next, kept| (*next - *kept).abs() <= 1e-12 * *kept);
                nodes
            }
        };
        let mut vs = Vec::with_capacity(ts.len());
        for &t in &ts {
            let v = invert(f, t, inner_cfg).map_err(|e| {
                Error::Numeric(format!("inner inversion failed at cache node t = {t:.6e}: {e}"))
            })?;
            vs.push(v);
        }
        let cache = if vs.iter().all(|&v| v > 0.0) {
            let ln_ts = ts.iter().map(|t| t.ln()).collect();
            let ln_vs = vs.iter().map(|v| v.ln()).collect();
            CachedCurve::LogLog(Pchip::new(ln_ts, ln_vs)?)
        } else {
            CachedCurve::Direct(Pchip::new(ts, vs)?)
        };
        Ok(IteratedInverter { p, outer_order, cache })
    }

    /// `ℒ⁻¹{ t^{1-p} · (inner inverse)(t) }(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let p = self.p;
        let cache = &self.cache;
        invert_gaver_stehfest(|t| Ok(t.powf(1.0 - p) * cache.eval(t)), x, self.outer_order)
    }

    /// The weights the outer pass uses (diagnostics).
    pub fn outer_weights(&self) -> Result<Vec<f64>> {
        stehfest_weights(self.outer_order)
    }
}

/// One-shot double inversion at a single point.
pub fn invert_iterated<T: TransformFn + ?Sized>(
    f: &T,
    p: f64,
    x: f64,
    cfg: &InversionConfig,
) -> Result<f64> {
    IteratedInverter::new(f, p, cfg, &[x])?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::{AnalyticFn, InterpGridSpec, RealFn};
    use crate::special::{hyp2f1, SeriesControl};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    /// `G_1{1/(1+u)}(s) = ₂F₁(1,1;2;1−s) = −ln(s)/(1−s)`, series-expanded
    /// near the removable point s = 1.
    fn stieltjes_of_reciprocal(s: Complex64) -> Complex64 {
        let w = 1.0 - s;
        if w.norm() < 1e-4 {
            // −ln(1−w)/w = 1 + w/2 + w²/3 + w³/4 + O(w⁴)
            return 1.0 + w / 2.0 + w * w / 3.0 + w * w * w / 4.0;
        }
        -s.ln() / w
    }

    #[test]
    fn recovers_reciprocal_density_from_its_stieltjes_transform() {
        let f = AnalyticFn(|s: Complex64| Ok(stieltjes_of_reciprocal(s)));
        let cfg =
            InversionConfig::gaver_stehfest(10).with_inner(InversionConfig::gaver_stehfest(10));
        for x in [0.5, 1.0, 2.0] {
            let got = invert_iterated(&f, 1.0, x, &cfg).unwrap();
            let want = 1.0 / (1.0 + x);
            assert_relative_eq!(got, want, max_relative = 1e-3);
        }
    }

    #[test]
    fn inner_talbot_agrees_with_inner_gaver_stehfest() {
        let f = AnalyticFn(|s: Complex64| Ok(stieltjes_of_reciprocal(s)));
        let cfg_gs =
            InversionConfig::gaver_stehfest(10).with_inner(InversionConfig::gaver_stehfest(10));
        let cfg_tb = InversionConfig::gaver_stehfest(10).with_inner(InversionConfig::talbot(32));
        for x in [0.7, 1.5] {
            let a = invert_iterated(&f, 1.0, x, &cfg_gs).unwrap();
            let b = invert_iterated(&f, 1.0, x, &cfg_tb).unwrap();
            let want = 1.0 / (1.0 + x);
            assert_relative_eq!(a, b, max_relative = 1e-3);
            assert_relative_eq!(b, want, max_relative = 1e-3);
        }
    }

    #[test]
    fn recovers_order_two_stieltjes_preimage() {
        // G_2{u(1+u)^{-2}}(s) = (1/6)·₂F₁(2,2;4;1−s); the recovery carries
        // the caller-side Γ(p) = Γ(2) = 1 factor
        let ctrl = SeriesControl::default();
        let f = RealFn(move |s: f64| Ok(hyp2f1(2.0, 2.0, 4.0, 1.0 - s, &ctrl)? / 6.0));
        let cfg =
            InversionConfig::gaver_stehfest(12).with_inner(InversionConfig::gaver_stehfest(10));
        let points = [0.5, 1.0, 3.0];
        let inv = IteratedInverter::new(&f, 2.0, &cfg, &points).unwrap();
        for x in points {
            let got = inv.eval(x).unwrap();
            let want = x / ((1.0 + x) * (1.0 + x));
            assert_relative_eq!(got, want, max_relative = 2e-3);
        }
    }

    #[test]
    fn shared_cache_matches_one_shot_inversions() {
        let f = AnalyticFn(|s: Complex64| Ok(stieltjes_of_reciprocal(s)));
        let cfg =
            InversionConfig::gaver_stehfest(10).with_inner(InversionConfig::gaver_stehfest(10));
        let points = [0.6, 0.9, 1.4];
        let inv = IteratedInverter::new(&f, 1.0, &cfg, &points).unwrap();
        for x in points {
            let shared = inv.eval(x).unwrap();
            let single = invert_iterated(&f, 1.0, x, &cfg).unwrap();
            // the shared cache holds the union of all points' outer nodes; at
            // each x the outer sum reads the same inner values up to node
            // dedup collapsing k/x collisions to within an ulp
            assert_relative_eq!(shared, single, max_relative = 1e-6);
        }
    }

    #[test]
    fn explicit_interp_grid_is_used_even_when_it_degrades_accuracy() {
        let f = AnalyticFn(|s: Complex64| Ok(stieltjes_of_reciprocal(s)));
        let exact = InversionConfig::gaver_stehfest(10)
            .with_inner(InversionConfig::gaver_stehfest(10));
        // deliberately coarse: 12 knots spanning the outer-node range
        let mut coarse = exact.clone();
        coarse.interp_grid =
            Some(InterpGridSpec { t_min: 0.05, t_max: 20.0, count: 12 });
        let x = 1.0;
        let with_nodes = invert_iterated(&f, 1.0, x, &exact).unwrap();
        let with_grid = invert_iterated(&f, 1.0, x, &coarse).unwrap();
        assert!(with_grid.is_finite());
        // the coarse grid must actually be in effect: its interpolation
        // error, amplified by the outer weights, moves the answer
        assert!(
            (with_grid - with_nodes).abs() > 1e-6,
            "coarse grid ignored: {with_grid} vs {with_nodes}"
        );
    }

    #[test]
    fn missing_inner_config_is_rejected() {
        let f = RealFn(|_s: f64| Ok(1.0));
        let err =
            invert_iterated(&f, 1.0, 1.0, &InversionConfig::gaver_stehfest(14)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn talbot_outer_is_rejected() {
        let f = AnalyticFn(|_s: Complex64| Ok(Complex64::new(1.0, 0.0)));
        let cfg = InversionConfig::talbot(32).with_inner(InversionConfig::gaver_stehfest(14));
        let err = invert_iterated(&f, 1.0, 1.0, &cfg).unwrap_err();
        match err {
            Error::Capability(msg) => assert!(msg.contains("gaver-stehfest"), "{msg}"),
            other => panic!("expected capability error, got {other:?}"),
        }
    }

    #[test]
    fn inner_failure_carries_node_context() {
        let f = RealFn(|s: f64| {
            if s > 5.0 {
                Err(Error::Numeric("synthetic failure".into()))
            } else {
                Ok(1.0 / s)
            }
        });
        let cfg = InversionConfig::gaver_stehfest(14)
            .with_inner(InversionConfig::gaver_stehfest(14));
        let err = invert_iterated(&f, 1.0, 1.0, &cfg).unwrap_err();
        match err {
            Error::Numeric(msg) => {
                assert!(msg.contains("cache node"), "{msg}");
                assert!(msg.contains("synthetic failure"), "{msg}");
            }
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_points() {
        let f = RealFn(|s: f64| Ok(1.0 / s));
        let cfg =
            InversionConfig::gaver_stehfest(10).with_inner(InversionConfig::gaver_stehfest(10));
        assert!(IteratedInverter::new(&f, 1.0, &cfg, &[]).is_err());
        assert!(IteratedInverter::new(&f, 1.0, &cfg, &[1.0, -2.0]).is_err());
        assert!(IteratedInverter::new(&f, 0.0, &cfg, &[1.0]).is_err());
    }
}
