//! Velocity profile, wall velocity and distribution-function corrections
//! reconstructed from the spectral densities of a [`NeumannSeries`].
//!
//! All quantities are per unit far-field gradient `G_v`:
//!
//! ```text
//! U_c^{(n)}(x) = ((2-q)/π) ∫_0^∞ cos(kx) E_n(k) dk
//! U(x)         = U_sl + x + Σ q^n U_c^{(n)}(x)
//! Φ_n(k, μ)    = [E_n(k) + B_n(μ)] / (1 + ikμ)
//! B_0(μ)       = μ² - U_0|μ|
//! B_n(μ)       = -U_n|μ| - (|μ|/π) ∫_0^∞ E_{n-1}(k) dk / (1 + k²μ²)
//! ```

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::neumann::NeumannSeries;
use crate::quadrature::{integrate_with_breaks, Trig};

/// Default profile abscissae: `0, 0.125, …, 25`.
pub fn default_x_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 * 0.125).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityProfile {
    pub alpha: f64,
    pub q: f64,
    pub x: Vec<f64>,
    /// `uc_by_order[n][i] = U_c^{(n)}(x_i)`.
    pub uc_by_order: Vec<Vec<f64>>,
    pub total: Vec<f64>,
    pub asymptote: Vec<f64>,
}

impl VelocityProfile {
    /// Column names in output order.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["x".to_string()];
        h.extend((0..self.uc_by_order.len()).map(|n| format!("Uc{n}")));
        h.push("U_total".into());
        h.push("U_asymptote".into());
        h
    }

    /// Row `i` in [`header`](Self::header) order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut r = vec![self.x[i]];
        r.extend(self.uc_by_order.iter().map(|u| u[i]));
        r.push(self.total[i]);
        r.push(self.asymptote[i]);
        r
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSlice {
    pub x: f64,
    pub mu: f64,
    pub h_as: f64,
    pub h_c: f64,
    pub h: f64,
}

fn check_order(n: usize, series: &NeumannSeries) -> Result<()> {
    if n > series.order {
        return domain(format!("order {n} requested but the series stops at {}", series.order));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return domain(format!("x must be finite and >= 0, got {x}"));
    }
    Ok(())
}

/// `U_c^{(n)}(x)/G_v`.
pub fn velocity_correction(n: usize, x: f64, series: &NeumannSeries, q: f64) -> Result<f64> {
    check_order(n, series)?;
    check_x(x)?;
    series.series_factor(q)?;
    let e = series.density(n);
    Ok((2.0 - q) * e.cosine_transform(x, &series.config.quad)?)
}

/// `Σ_n q^n U_c^{(n)}(x)/G_v` over every computed order.
pub fn total_correction(x: f64, series: &NeumannSeries, q: f64) -> Result<f64> {
    let mut acc = 0.0;
    for n in (0..=series.order).rev() {
        acc = acc * q + velocity_correction(n, x, series, q)?;
    }
    Ok(acc)
}

/// `U(0)/G_v = U_sl/G_v + Σ_{n ≤ order} q^n U_c^{(n)}(0)/G_v`, with `U_sl` from
/// the whole series.
pub fn wall_velocity(series: &NeumannSeries, q: f64, order: usize) -> Result<f64> {
    check_order(order, series)?;
    let mut u = series.series_factor(q)?;
    for n in 0..=order {
        u += q.powi(n as i32) * velocity_correction(n, 0.0, series, q)?;
    }
    Ok(u)
}

/// Wall velocity truncated after each order `0..=order`.
pub fn wall_velocity_partials(series: &NeumannSeries, q: f64, order: usize) -> Result<Vec<f64>> {
    check_order(order, series)?;
    let mut u = series.series_factor(q)?;
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        u += q.powi(n as i32) * velocity_correction(n, 0.0, series, q)?;
        out.push(u);
    }
    Ok(out)
}

/// Velocity profile on `x_grid` using every computed order.
pub fn full_profile(series: &NeumannSeries, q: f64, x_grid: &[f64]) -> Result<VelocityProfile> {
    if x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("profile abscissae must be increasing");
    }
    if let Some(&x) = x_grid.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return domain(format!("profile abscissae must be finite and >= 0, got {x}"));
    }
    let slip = series.series_factor(q)?;
    let rows: Vec<Vec<f64>> = x_grid
        .par_iter()
        .map(|&x| {
            (0..=series.order)
                .map(|n| velocity_correction(n, x, series, q))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let uc_by_order: Vec<Vec<f64>> = (0..=series.order)
        .map(|n| rows.iter().map(|r| r[n]).collect())
        .collect();
    let asymptote: Vec<f64> = x_grid.iter().map(|x| slip + x).collect();
    let total = rows
        .iter()
        .zip(&asymptote)
        .map(|(r, a)| a + r.iter().rev().fold(0.0, |acc, u| acc * q + u))
        .collect();
    Ok(VelocityProfile {
        alpha: series.alpha,
        q,
        x: x_grid.to_vec(),
        uc_by_order,
        total,
        asymptote,
    })
}

/// The `k`-independent part `B_n(μ)` of the bracket of `Φ_n`.
pub fn bracket_constant(n: usize, mu: f64, series: &NeumannSeries) -> Result<f64> {
    check_order(n, series)?;
    let m = mu.abs();
    if n == 0 {
        return Ok(mu * mu - series.u[0] * m);
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let prev = series.density(n - 1);
    let m2 = m * m;
    let integral = prev.transform(0.0, |k| 1.0 / (1.0 + k * k * m2), Trig::Cos, &series.config.quad)?;
    Ok(-series.u[n] * m - m / PI * integral)
}

/// `Φ_n(k, μ)`.
pub fn distribution_spectral(n: usize, k: f64, mu: f64, series: &NeumannSeries) -> Result<Complex64> {
    let b = bracket_constant(n, mu, series)?;
    let e = series.density(n).value(k);
    Ok(Complex64::new(e + b, 0.0) / Complex64::new(1.0, k * mu))
}

/// `h_c^{(n)}(x, μ)`: the inverse Fourier transform of `Φ_n`, times `(2-q)`.
///
/// The constant part of the bracket is transformed in closed form; only the
/// `E_n` part is integrated numerically.
pub fn distribution_correction_order(
    n: usize,
    x: f64,
    mu: f64,
    series: &NeumannSeries,
    q: f64,
) -> Result<f64> {
    check_x(x)?;
    series.series_factor(q)?;
    let b = bracket_constant(n, mu, series)?;
    let e = series.density(n);
    let spec = &series.config.quad;
    let m2 = mu * mu;
    let cos_part = e.transform(x, |k| 1.0 / (1.0 + k * k * m2), Trig::Cos, spec)?;
    let sin_part = if x > 0.0 && mu != 0.0 {
        e.transform(x, |k| k * mu / (1.0 + k * k * m2), Trig::Sin, spec)?
    } else {
        0.0
    };
    let smooth = 2.0 / PI * (cos_part + sin_part);

    let k_max = e.k_max();
    let tail_est = (e.value(k_max) * k_max / (1.0 + k_max * k_max * m2)).abs();
    if tail_est > 1e-3 {
        warn!("slow decay of the spectral integrand at mu = {mu}: tail estimate {tail_est:.2e}");
    }

    let source = if mu == 0.0 {
        0.0
    } else if x == 0.0 {
        b / mu.abs()
    } else if mu > 0.0 {
        2.0 * b * (-x / mu).exp() / mu
    } else {
        0.0
    };
    Ok((2.0 - q) * (smooth + source))
}

/// `h(x, μ) = h_as + Σ q^n h_c^{(n)}` with `h_as = 2U_sl + 2(x - μ)`.
pub fn distribution_correction(x: f64, mu: f64, series: &NeumannSeries, q: f64) -> Result<DistributionSlice> {
    let slip = series.series_factor(q)?;
    let mut h_c = 0.0;
    for n in (0..=series.order).rev() {
        h_c = h_c * q + distribution_correction_order(n, x, mu, series, q)?;
    }
    let h_as = 2.0 * slip + 2.0 * (x - mu);
    Ok(DistributionSlice {
        x,
        mu,
        h_as,
        h_c,
        h: h_as + h_c,
    })
}

/// `h_c(x, μ)` for `μ < 0` by integrating the kinetic equation along the
/// characteristic from `x = +∞`:
/// `h_c = (1/|μ|) ∫_x^∞ e^{-(t-x)/|μ|} 2U_c(t) dt`.
pub fn distribution_quadrant(x: f64, mu: f64, series: &NeumannSeries, q: f64) -> Result<f64> {
    check_x(x)?;
    if !(mu < 0.0) {
        return domain(format!("the characteristic route needs mu < 0, got {mu}"));
    }
    let m = mu.abs();
    // e^{-s} with s = (t-x)/|μ|; 40 e-foldings are enough
    let v = integrate_with_breaks(
        |s| {
            let t = x + m * s;
            match total_correction(t, series, q) {
                Ok(u) => 2.0 * u * (-s).exp(),
                Err(_) => f64::NAN,
            }
        },
        &[0.0, 1.0, 4.0, 12.0, 40.0],
        &series.config.quad.scaled(1e3),
    )?;
    if !v.is_finite() {
        return domain(format!("velocity correction failed along the characteristic at x = {x}"));
    }
    Ok(v)
}

/// `(1/2) ∫ K(μ) h_c(x, μ) dμ`; equals `U_c(x)` when the pieces are consistent.
pub fn density_moment(x: f64, series: &NeumannSeries, q: f64, order: Option<usize>) -> Result<f64> {
    let ctx = series.ctx();
    let h = |mu: f64| -> f64 {
        let v = match order {
            Some(n) => distribution_correction_order(n, x, mu, series, q),
            None => distribution_correction(x, mu, series, q).map(|s| s.h_c),
        };
        v.map(|h| ctx.kernel(mu) * h).unwrap_or(f64::NAN)
    };
    let c = ctx.cutoff;
    let mut pts = vec![-c];
    pts.extend(ctx.t_breaks(&[0.05, 0.2, 1.0]).iter().rev().skip(1).map(|t| -t));
    pts.extend(ctx.t_breaks(&[0.05, 0.2, 1.0]).iter().skip(1));
    let v = integrate_with_breaks(h, &pts, &series.config.quad.scaled(1e4))?;
    if !v.is_finite() {
        return domain("distribution evaluation failed inside the moment integral");
    }
    Ok(0.5 * v)
}
