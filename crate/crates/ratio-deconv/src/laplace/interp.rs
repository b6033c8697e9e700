//! Monotone (Fritsch–Carlson) piecewise-cubic Hermite interpolation.
//!
//! Used for the inner-function cache of the double inversion and for the
//! mass diagnostic: the shape-preserving slope limiter never overshoots,
//! so interpolating a positive density stays positive, and each segment's
//! cubic integrates in closed form.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// endpoint derivatives per knot, Fritsch–Carlson limited
    ds: Vec<f64>,
}

impl Pchip {
    /// Build from strictly increasing abscissae (≥ 2 points).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Config(format!(
                "pchip needs two matching point lists of length >= 2, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config(format!(
                    "pchip abscissae must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config("pchip points must be finite".into()));
        }
        let ds = fritsch_carlson_slopes(&xs, &ys);
        Ok(Pchip { xs, ys, ds })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Evaluate at `t`, clamping to the end knots outside the range (the
    /// caches built on top of this always cover their queries; the clamp
    /// only absorbs end-point rounding).
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] {
            return self.ys[0];
        }
        if t >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let u = (t - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.ds[i] * h, self.ds[i + 1] * h);
        // cubic Hermite basis
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1
    }

    /// Exact integral of the interpolant over its full range: per segment
    /// `h(y₀+y₁)/2 + h²(d₀−d₁)/12`.
    pub fn integral(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.xs.len() - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            acc += h * (self.ys[i] + self.ys[i + 1]) / 2.0
                + h * h * (self.ds[i] - self.ds[i + 1]) / 12.0;
        }
        acc
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }
}

fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 2 {
        let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            // weighted harmonic mean keeps the interpolant monotone
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// One-sided three-point end slope with the standard monotonicity clamp.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        s = 0.0;
    } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
        s = 3.0 * d0;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_knot_values() {
        let xs: Vec<f64> = vec![0.1, 0.5, 1.0, 2.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| x * (-x).exp()).collect();
        let p = Pchip::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_relative_eq!(p.eval(*x), *y, max_relative = 1e-15);
        }
    }

    #[test]
    fn is_accurate_on_smooth_data() {
        // dense uniform grid: third-order accuracy puts the error near 1e-8
        let xs: Vec<f64> = (0..=795).map(|i| 0.05 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
        let p = Pchip::new(xs, ys).unwrap();
        for i in 0..700 {
            let t = 0.055 + i as f64 * 0.011;
            assert_relative_eq!(p.eval(t), (-t).exp(), max_relative = 1e-6);
        }

        // 200-point log grid over [0.02, 5]: coarser cells near the right
        // end, so allow the measured few-1e-5 with margin
        let xs: Vec<f64> = (0..200)
            .map(|i| 0.02 * (5.0f64 / 0.02).powf(i as f64 / 199.0))
            .collect();
        let cases: [(fn(f64) -> f64, &str); 3] = [
            (|x| (-x).exp(), "exp(-x)"),
            (|x| x.powi(-2), "x^-2"),
            (|x| x / ((1.0 + x) * (1.0 + x)), "x/(1+x)^2"),
        ];
        for (f, name) in cases {
            let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let p = Pchip::new(xs.clone(), ys).unwrap();
            for i in 0..400 {
                let t = 0.021 * (4.9f64 / 0.021).powf(i as f64 / 399.0);
                assert_relative_eq!(p.eval(t), f(t), max_relative = 5e-4);
            }
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        // step-like data that a plain cubic spline would overshoot
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let p = Pchip::new(xs, ys).unwrap();
        let mut prev = -1e-12;
        for i in 0..=500 {
            let t = 5.0 * i as f64 / 500.0;
            let v = p.eval(t);
            assert!(v >= prev - 1e-12, "not monotone at {t}: {v} < {prev}");
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "overshoot at {t}: {v}");
            prev = v;
        }
    }

    #[test]
    fn integral_matches_quadrature() {
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.02).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * (-x).exp()).collect();
        let p = Pchip::new(xs, ys).unwrap();
        // ∫₀⁸ t e^{-t} dt = 1 - 9 e^{-8}
        let exact = 1.0 - 9.0 * (-8.0f64).exp();
        assert_relative_eq!(p.integral(), exact, max_relative = 1e-7);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Pchip::new(vec![1.0], vec![1.0]).is_err());
        assert!(Pchip::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Pchip::new(vec![2.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Pchip::new(vec![1.0, 2.0], vec![1.0, f64::NAN]).is_err());
        assert!(Pchip::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn clamps_outside_range() {
        let p = Pchip::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap();
        assert_eq!(p.eval(0.5), 4.0);
        assert_eq!(p.eval(3.5), 6.0);
    }
}
