//! Exact diffuse-wall slip from the phase of the dispersion function.
//!
//! ```text
//! λ(τ)  = 1 + τ p.v.∫ K(t)/(t - τ) dt
//! θ(τ)  = arg(λ(τ) + iπτK(τ)),   θ(0+) = 0, θ(∞) = π
//! V_1   = -(1/π) ∫_0^∞ (θ(τ) - π) dτ
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernel::KernelContext;
use crate::quadrature::{integrate_with_breaks, principal_value_with_breaks};

/// `Re λ(τ)`.
///
/// K is even, so the full-line integral folds onto `[0, ∞)` as
/// `p.v.∫_0^∞ K(t) 2τ/((t - τ)(t + τ)) dt`.
pub fn lambda_real(tau: f64, ctx: &KernelContext) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("lambda needs finite tau > 0, got {tau}"));
    }
    let b = ctx.cutoff.max(2.0 * tau);
    let mut pts = ctx.t_breaks(&[]);
    if b > ctx.cutoff {
        pts.push(b);
    }
    let pv = principal_value_with_breaks(
        |t| 2.0 * tau * ctx.kernel(t) / (t + tau),
        &pts,
        tau,
        ctx.spec(),
    )?;
    Ok(1.0 + tau * pv)
}

/// Continuous phase `θ(τ) = arg λ⁺(τ)` in `(0, π)`.
pub fn phase_theta(tau: f64, ctx: &KernelContext) -> Result<f64> {
    let re = lambda_real(tau, ctx)?;
    let im = PI * tau * ctx.kernel(tau);
    Ok(im.atan2(re))
}

/// Where `π - θ` has dropped below `1e-10` for good.
pub fn tau_max(ctx: &KernelContext) -> Result<f64> {
    let mut tau = 1.0f64.max(ctx.alpha.max(0.0).sqrt());
    loop {
        if PI - phase_theta(tau, ctx)? < 1e-10 && ctx.kernel(tau) < 1e-12 {
            return Ok(tau);
        }
        tau += 0.5;
        if tau > 2.0 * ctx.cutoff + 10.0 {
            return Err(Error::NonConvergence {
                a: 0.0,
                b: tau,
                estimate: PI - phase_theta(tau, ctx)?,
                tolerance: 1e-10,
            });
        }
    }
}

/// `λ` and `θ` sampled on a uniform τ-grid, with `ζ = θ - π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionPhase {
    pub alpha: f64,
    pub tau_grid: Vec<f64>,
    pub lambda_re: Vec<f64>,
    pub theta: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl DispersionPhase {
    /// Sample on `points` equal steps of `(0, tau_max]`; the grid is refined
    /// once if adjacent phases jump by more than `π/2`.
    pub fn sample(ctx: &KernelContext, tau_max: f64, points: usize) -> Result<Self> {
        match Self::sample_once(ctx, tau_max, points) {
            Err(Error::BranchJump { .. }) => Self::sample_once(ctx, tau_max, 2 * points),
            other => other,
        }
    }

    fn sample_once(ctx: &KernelContext, tau_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(tau_max > 0.0) {
            return domain("phase sampling needs tau_max > 0 and at least two points");
        }
        let h = tau_max / points as f64;
        let tau_grid: Vec<f64> = (1..=points).map(|i| i as f64 * h).collect();
        let lambda_re: Vec<f64> = tau_grid
            .par_iter()
            .map(|&t| lambda_real(t, ctx))
            .collect::<Result<_>>()?;
        let theta: Vec<f64> = tau_grid
            .iter()
            .zip(&lambda_re)
            .map(|(&t, &l)| (PI * t * ctx.kernel(t)).atan2(l))
            .collect();
        for i in 1..theta.len() {
            let jump = theta[i] - theta[i - 1];
            if jump.abs() > PI / 2.0 {
                return Err(Error::BranchJump {
                    tau_left: tau_grid[i - 1],
                    tau_right: tau_grid[i],
                    jump,
                });
            }
        }
        let zeta = theta.iter().map(|t| t - PI).collect();
        Ok(Self {
            alpha: ctx.alpha,
            tau_grid,
            lambda_re,
            theta,
            zeta,
        })
    }

    /// First sign change of `λ`, refined by bisection.
    pub fn zero_crossing(&self, ctx: &KernelContext) -> Option<f64> {
        let i = self.lambda_re.windows(2).position(|w| w[0] > 0.0 && w[1] <= 0.0)?;
        let (mut a, mut b) = (self.tau_grid[i], self.tau_grid[i + 1]);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            match lambda_real(m, ctx) {
                Ok(v) if v > 0.0 => a = m,
                Ok(_) => b = m,
                Err(_) => return None,
            }
        }
        Some(0.5 * (a + b))
    }
}

/// `V_1(α) = U_sl/G_v` at `q = 1`, from the phase integral.
pub fn exact_slip_diffuse(alpha: f64) -> Result<f64> {
    let ctx = KernelContext::new(alpha)?;
    exact_slip_with(&ctx)
}

/// As [`exact_slip_diffuse`] for a prepared context.
pub fn exact_slip_with(ctx: &KernelContext) -> Result<f64> {
    let top = tau_max(ctx)?;
    let mut pts = ctx.t_breaks(&[]);
    pts.retain(|&p| p < top);
    pts.push(top);
    let pts = crate::quadrature::merge_breaks(0.0, top, &pts);
    let v = integrate_with_breaks(
        |tau| {
            if tau <= 0.0 {
                return PI;
            }
            phase_theta(tau, ctx).map(|th| PI - th).unwrap_or(f64::NAN)
        },
        &pts,
        &ctx.spec().scaled(10.0),
    )?;
    if !v.is_finite() {
        return domain(format!("phase evaluation failed for alpha = {}", ctx.alpha));
    }
    Ok(v / PI)
}

/// `U(0)/G_v = √(l_2/l_0)` at `q = 1`.
pub fn exact_wall_velocity(alpha: f64) -> Result<f64> {
    let ctx = KernelContext::new(alpha)?;
    Ok((ctx.l2 / ctx.l0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neumann::slip_velocity;
    use approx::assert_abs_diff_eq;

    // Dawson's integral e^{-x²} ∫_0^x e^{s²} ds by composite Simpson.
    fn dawson(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let f = |s: f64| (s * s - x * x).exp();
        let mut acc = f(0.0) + f(x);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn lambda_maxwell_limit() {
        let ctx = KernelContext::new(-30.0).unwrap();
        assert_abs_diff_eq!(lambda_real(1e-4, &ctx).unwrap(), 1.0, epsilon = 1e-7);
        for tau in [0.5, 1.0, 2.0] {
            assert_abs_diff_eq!(lambda_real(tau, &ctx).unwrap(), 1.0 - 2.0 * tau * dawson(tau), epsilon = 1e-9);
        }
        let l6 = lambda_real(6.0, &ctx).unwrap();
        assert!(l6 < 0.0);
        assert_abs_diff_eq!(l6, 1.0 - 12.0 * dawson(6.0), epsilon = 1e-9);
        // -Σ (2j-1)!!/(2^j τ^{2j})
        let asym: f64 = [0.5, 0.75, 1.875, 6.5625].iter().enumerate().map(|(j, c)| -c / 6f64.powi(2 * j as i32 + 2)).sum();
        assert_abs_diff_eq!(l6, asym, epsilon = 1e-6);
        assert!(lambda_real(0.0, &ctx).is_err());
    }

    #[test]
    fn phase_limits() {
        let ctx = KernelContext::new(-30.0).unwrap();
        let small = phase_theta(1e-4, &ctx).unwrap();
        assert_abs_diff_eq!(small, PI * 1e-4 / PI.sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(phase_theta(8.0, &ctx).unwrap(), PI, epsilon = 1e-4);
        let ph = DispersionPhase::sample(&ctx, 8.0, 160).unwrap();
        let z = ph.zero_crossing(&ctx).unwrap();
        assert_abs_diff_eq!(phase_theta(z, &ctx).unwrap(), PI / 2.0, epsilon = 1e-8);
        assert!(ph.zeta.iter().all(|z| *z > -PI && *z <= 0.0));
    }

    #[test]
    fn maxwell_slip() {
        let v = exact_slip_diffuse(-30.0).unwrap();
        assert_abs_diff_eq!(v, 1.0162, epsilon = 5e-4);
        let neumann = slip_velocity(-30.0, 1.0, 3).unwrap().c;
        assert!((v - neumann).abs() <= 2e-3);
    }

    #[test]
    fn wall_velocity_values() {
        assert_abs_diff_eq!(exact_wall_velocity(-30.0).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        let mut prev = 0.0;
        for i in 0..=20 {
            let w = exact_wall_velocity(-10.0 + i as f64).unwrap();
            assert!(w > prev);
            prev = w;
        }
    }
}
