//! Forward Laplace transforms by quadrature — the independent oracle for
//! round-trip tests of the inversion engines.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// `∫₀^∞ e^{-st} g(t) dt` by adaptive quadrature (relative tolerance
/// 1e-10). `s` must be positive and to the right of the abscissa of
/// convergence of `g`.
pub fn forward_laplace<G>(g: G, s: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("forward_laplace", format!("s must be positive, got {s}")));
    }
    quad::integrate_semi_inf(|t| (-s * t).exp() * g(t), 0.0, 1e-10, 1e-300)
}

/// Forward transform at complex `s`, via integration along the rotated
/// ray `t = u·e^{iφ}`.
///
/// A straight real-axis integral diverges once `Re s` drops below the
/// decay rate of `g`, which is exactly where Talbot contour nodes live.
/// If `g` is analytic in the right half-plane and `|g(t)| ≲ e^{-decay·|t|}`
/// there, Cauchy's theorem lets the ray tilt by `φ` as long as
/// `Re((s + decay)·e^{iφ})` stays positive; we pick the admissible `φ`
/// closest to cancelling `arg(s + decay)`.
pub fn forward_laplace_complex<G>(g: G, s: Complex64, decay: f64) -> Result<Complex64>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    // Talbot's outermost nodes push arg(s + decay) to within ~0.1 of ±π,
    // so the ray must be allowed almost perpendicular; convergence there
    // is still fast because |s + decay| is large at those nodes.
    const MAX_TILT: f64 = std::f64::consts::FRAC_PI_2 - 0.01;
    let shifted = s + decay;
    let psi = shifted.im.atan2(shifted.re);
    let phi = -psi.signum() * psi.abs().min(MAX_TILT);
    if (psi + phi).abs() >= std::f64::consts::FRAC_PI_2 - 0.005 {
        return Err(Error::domain(
            "forward_laplace_complex",
            format!("no admissible integration ray for s = {s} with decay rate {decay}"),
        ));
    }
    let ray = Complex64::from_polar(1.0, phi);
    let integrand = |u: f64| -> Complex64 {
        let t = u * ray;
        match g(t) {
            Ok(v) => (-s * t).exp() * v * ray,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let re = quad::integrate_semi_inf(|u| integrand(u).re, 0.0, 1e-10, 1e-300)?;
    let im = quad::integrate_semi_inf(|u| integrand(u).im, 0.0, 1e-10, 1e-14)?;
    Ok(Complex64::new(re, im))
}
