//! Special functions used by the density catalog and the inversion engines.
//!
//! Everything here is plain `f64` (plus `Complex64` twins where the Talbot
//! contour needs them), with explicit convergence control instead of hidden
//! globals. The inventory:
//!
//! | function | notes |
//! |----------|-------|
//! | [`ln_gamma`], [`gamma`], [`digamma`] | Lanczos (g = 7, n = 9) with reflection |
//! | [`beta_fn`], [`ln_beta`] | via `ln_gamma` |
//! | [`reg_inc_gamma_lower`] | series / continued fraction split at `x = a + 1` |
//! | [`reg_inc_beta`] | continued fraction with the symmetry reduction |
//! | [`hyp1f1`], [`hyp1f1_c`] | Kummer's M, with the e^z transformation for large negative arguments |
//! | [`hyp2f1`] | Gauss series plus Pfaff and near-unit-argument connection formulas |
//! | [`binomial_coeff`] | exact integer recurrence |

mod gamma;
mod hyp;
mod incbeta;

pub use gamma::{digamma, gamma, ln_gamma, reg_inc_gamma_lower};
pub use hyp::{hyp1f1, hyp1f1_c, hyp2f1};
pub use incbeta::{beta_fn, ln_beta, reg_inc_beta};

use crate::error::{Error, Result};

/// Termination policy for the hypergeometric series.
///
/// A series stops once two consecutive terms fall below `rel_tol` times the
/// running sum, and fails with [`Error::Convergence`] after `max_terms`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { max_terms: 2000, rel_tol: 1e-14 }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Config("SeriesControl: max_terms must be >= 1".into()));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "SeriesControl: rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        Ok(SeriesControl { max_terms, rel_tol })
    }
}

/// Binomial coefficient `C(n, k)` through the exact multiplicative
/// recurrence in 128-bit integers (every intermediate division is exact).
///
/// Returns `0` for `k > n`; errors if the exact value overflows `u128`.
/// Values above 2^53 are rounded on conversion to `f64`.
pub fn binomial_coeff(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Ok(0.0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(|| Error::Numeric(format!("binomial_coeff({n}, {k}) overflows u128")))?;
        acc /= i as u128; // exact: acc is C(n-k+i, i) after this step
    }
    Ok(acc as f64)
}
