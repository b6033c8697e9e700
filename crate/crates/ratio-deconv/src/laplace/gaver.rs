//! Gaver–Stehfest inversion: real nodes, alternating weights.
//!
//! The approximation is
//!
//! ```text
//! f(t) ≈ (ln 2 / t) Σ_{k=1}^{n} V_k F(k·ln2/t)
//! ```
//!
//! with the classical Stehfest weights `V_k`. All factorials fit exactly
//! in an `f64` for `n ≤ 18` (`18! < 2^53`), which is also where the
//! method's double-precision usefulness ends: the weights alternate with
//! magnitudes near `10^{n/2}`, so each order past that loses more to
//! cancellation than it gains in theoretical order.

use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 4;
pub const MAX_ORDER: usize = 18;
pub const DEFAULT_ORDER: usize = 14;

fn check_order(order: usize) -> Result<()> {
    if order % 2 != 0 || !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::Config(format!(
            "gaver-stehfest order must be even and in [{MIN_ORDER}, {MAX_ORDER}], got {order} \
             (higher orders lose double precision to cancellation)"
        )));
    }
    Ok(())
}

/// The weights `V_1..V_n` for an even order `n`.
pub fn stehfest_weights(order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    // exact factorials: 18! = 6402373705728000 < 2^53
    let mut fact = [1.0f64; MAX_ORDER + 1];
    for i in 1..=MAX_ORDER {
        fact[i] = fact[i - 1] * i as f64;
    }
    let half = order / 2;
    let mut weights = Vec::with_capacity(order);
    for k in 1..=order {
        let mut sum = 0.0;
        for j in k.div_ceil(2)..=k.min(half) {
            sum += (j as f64).powi(half as i32) * fact[2 * j]
                / (fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k]);
        }
        let sign = if (half + k) % 2 == 0 { 1.0 } else { -1.0 };
        weights.push(sign * sum);
    }
    Ok(weights)
}

/// Invert `F` at `t > 0` with the given even order.
pub fn invert_gaver_stehfest<F>(f: F, t: f64, order: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("invert_gaver_stehfest", format!("t must be positive, got {t}")));
    }
    let weights = stehfest_weights(order)?;
    let ln2_t = std::f64::consts::LN_2 / t;
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        let s = (k + 1) as f64 * ln2_t;
        let val = f(s)?;
        if !val.is_finite() {
            return Err(Error::Numeric(format!(
                "transform returned non-finite value {val} at gaver-stehfest node s = {s}"
            )));
        }
        acc += w * val;
    }
    Ok(acc * ln2_t)
}
