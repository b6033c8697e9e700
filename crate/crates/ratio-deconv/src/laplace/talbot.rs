//! Fixed-Talbot inversion (Abate–Valkó).
//!
//! The Bromwich integral is deformed onto the contour
//! `s(θ) = r·θ·(cot θ + i)`, `θ ∈ (-π, π)`, whose steep descent into the
//! left half-plane makes the trapezoid rule geometrically convergent.
//! With `M` nodes and the per-point radius `r = contour_scale · 2M/(5t)`,
//!
//! ```text
//! f(t) ≈ (r/M) [ ½ e^{rt} F(r) + Σ_{k=1}^{M-1} Re( e^{t·s(θ_k)} F(s(θ_k)) (1 + i·σ(θ_k)) ) ]
//! ```
//!
//! where `θ_k = kπ/M` and `σ(θ) = θ + (θ·cot θ − 1)·cot θ`. All nodes
//! keep `Im s > 0` (`k ≥ 1`) or sit on the positive real axis (`k = 0`),
//! so principal-branch transforms are evaluated away from their cut.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 8;
pub const DEFAULT_NODES: usize = 32;
pub const DEFAULT_CONTOUR_SCALE: f64 = 1.0;

/// Contour points for one evaluation time, exposed for tests and
/// diagnostics; index 0 is the real point `s = r`.
pub fn talbot_nodes(t: f64, nodes: usize, contour_scale: f64) -> Vec<Complex64> {
    let m = nodes as f64;
    let r = contour_scale * 2.0 * m / (5.0 * t);
    let mut out = Vec::with_capacity(nodes);
    out.push(Complex64::new(r, 0.0));
    for k in 1..nodes {
        let theta = k as f64 * std::f64::consts::PI / m;
        let cot = theta.cos() / theta.sin();
        out.push(r * theta * Complex64::new(cot, 1.0));
    }
    out
}

/// Invert `F` at `t > 0` with `M = nodes` contour points.
pub fn invert_talbot<F>(f: F, t: f64, nodes: usize, contour_scale: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("invert_talbot", format!("t must be positive, got {t}")));
    }
    if nodes < MIN_NODES {
        return Err(Error::Config(format!("talbot needs at least {MIN_NODES} nodes, got {nodes}")));
    }
    if !(contour_scale > 0.0 && contour_scale.is_finite()) {
        return Err(Error::Config(format!("talbot contour_scale must be positive, got {contour_scale}")));
    }
    let m = nodes as f64;
    let r = contour_scale * 2.0 * m / (5.0 * t);

    let v0 = f(Complex64::new(r, 0.0))?;
    if !(v0.re.is_finite() && v0.im.is_finite()) {
        return Err(Error::Numeric(format!("transform non-finite at talbot node s = {r} (k = 0)")));
    }
    let mut acc = 0.5 * (r * t).exp() * v0.re;

    for k in 1..nodes {
        let theta = k as f64 * std::f64::consts::PI / m;
        let cot = theta.cos() / theta.sin();
        let s = r * theta * Complex64::new(cot, 1.0);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let val = f(s)?;
        if !(val.re.is_finite() && val.im.is_finite()) {
            return Err(Error::Numeric(format!("transform non-finite at talbot node s = {s} (k = {k})")));
        }
        let term = (t * s).exp() * val * Complex64::new(1.0, sigma);
        acc += term.re;
    }
    Ok(acc * r / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn unit_step() {
        let f = invert_talbot(|s| Ok(1.0 / s), 3.0, DEFAULT_NODES, 1.0).unwrap();
        assert_relative_eq!(f, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn double_pole_gives_t_exponential() {
        for t in [0.1, 1.0, 5.0, 10.0] {
            let f = invert_talbot(|s| Ok(((s + 1.0) * (s + 1.0)).inv()), t, DEFAULT_NODES, 1.0)
                .unwrap();
            // measured worst case is ~4e-9 relative at t = 10, where the
            // contour is widest; epsilon covers t e^{-t} ≈ 4.5e-4 there
            assert_relative_eq!(f, t * (-t).exp(), max_relative = 1e-7, epsilon = 1e-11);
        }
    }

    #[test]
    fn branch_cut_transform_inverts() {
        // 1/sqrt(s) -> 1/sqrt(pi t); exercises the principal branch along
        // the full contour
        for t in [0.5, 2.0] {
            let f = invert_talbot(|s| Ok(s.sqrt().inv()), t, DEFAULT_NODES, 1.0).unwrap();
            assert_relative_eq!(f, 1.0 / (std::f64::consts::PI * t).sqrt(), max_relative = 1e-9);
        }
    }

    #[test]
    fn sigma_matches_alternative_form() {
        // θ + (θ·cotθ − 1)·cotθ == θ/sin²θ − cotθ
        for k in 1..32 {
            let theta = k as f64 * std::f64::consts::PI / 32.0;
            let cot = theta.cos() / theta.sin();
            let lhs = theta + (theta * cot - 1.0) * cot;
            let rhs = theta / (theta.sin() * theta.sin()) - cot;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-11, epsilon = 1e-11);
        }
    }

    #[test]
    fn nodes_stay_off_the_negative_real_axis() {
        let nodes = talbot_nodes(1.3, 32, 1.0);
        assert!(nodes[0].re > 0.0 && nodes[0].im == 0.0);
        for s in &nodes[1..] {
            assert!(s.im > 0.0, "node {s} touches or crosses the negative real axis");
        }
    }

    #[test]
    fn too_few_nodes_rejected() {
        assert!(matches!(
            invert_talbot(|s| Ok(1.0 / s), 1.0, 4, 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn non_finite_value_reports_node() {
        let err = invert_talbot(|s| Ok(s.ln().inv() / (s - s)), 1.0, 32, 1.0).unwrap_err();
        match err {
            Error::Numeric(msg) => assert!(msg.contains("talbot node"), "{msg}"),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn inversion_is_linear() {
        let t = 0.9;
        let inv = |f: &dyn Fn(Complex64) -> Result<Complex64>| {
            invert_talbot(f, t, DEFAULT_NODES, 1.0).unwrap()
        };
        let lhs = inv(&|s| Ok(2.0 / s + c(0.7) / (s + 1.0)));
        let rhs = 2.0 * inv(&|s| Ok(s.inv())) + 0.7 * inv(&|s| Ok((s + 1.0).inv()));
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }
}
