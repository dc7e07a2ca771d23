//! The log-Fermi kernel `K_F(μ, α) = ln(1 + e^{α - μ²}) / (2 l0(α))` and its moments.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{integrate_with_breaks, QuadratureSpec, SemiInfiniteDomain};

/// Smallest accepted reduced chemical potential; below it `e^α` underflows.
pub const ALPHA_MIN: f64 = -700.0;
/// Largest accepted reduced chemical potential.
pub const ALPHA_MAX: f64 = 500.0;
/// Below this value the classical (Maxwell) kernel is substituted analytically.
pub const MAXWELL_SWITCH: f64 = -40.0;
/// Highest `T_n(0)` kept in a context; the Taylor forms of `T_4` need `T_8(0)`.
pub const MAX_RAW_MOMENT: usize = 8;

/// Numerically stable `ln(1 + e^z)`.
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn half_gamma(n: usize) -> f64 {
    // Γ((n+1)/2) by recursion from Γ(1/2) = √π and Γ(1) = 1.
    let (mut g, mut s) = if n % 2 == 0 { (PI.sqrt(), 0.5) } else { (1.0, 1.0) };
    while s < (n as f64 + 1.0) / 2.0 - 1e-12 {
        g *= s;
        s += 1.0;
    }
    g
}

/// Reduced chemical potential together with the moments the solver needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelContext {
    pub alpha: f64,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub cutoff: f64,
    /// `T_n(0) = 2 ∫_0^∞ K t^n dt` for `n = 0..=MAX_RAW_MOMENT`.
    #[serde(skip)]
    raw_moments: Vec<f64>,
    #[serde(skip)]
    spec: QuadratureSpec,
}

impl KernelContext {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_spec(alpha, QuadratureSpec::default())
    }

    pub fn with_spec(alpha: f64, spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        if !alpha.is_finite() || !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            return domain(format!(
                "alpha = {alpha} outside the supported range [{ALPHA_MIN}, {ALPHA_MAX}]"
            ));
        }
        let cutoff = SemiInfiniteDomain::log_fermi(alpha).cutoff;
        let mut ctx = Self {
            alpha,
            l0: 0.0,
            l1: 0.0,
            l2: 0.0,
            cutoff,
            raw_moments: Vec::new(),
            spec,
        };
        let weighted: Vec<f64> = (0..=MAX_RAW_MOMENT)
            .map(|n| ctx.weighted_moment(n))
            .collect::<Result<_>>()?;
        ctx.l0 = weighted[0];
        ctx.l1 = weighted[1];
        ctx.l2 = weighted[2];
        ctx.raw_moments = weighted.iter().map(|m| m / weighted[0]).collect();
        ctx.raw_moments[0] = 1.0;
        Ok(ctx)
    }

    pub fn is_maxwell(&self) -> bool {
        self.alpha < MAXWELL_SWITCH
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// `∫_0^∞ t^n ln(1 + e^{α - t²}) dt`.
    pub fn weighted_moment(&self, n: usize) -> Result<f64> {
        if self.is_maxwell() {
            return Ok(self.alpha.exp() * half_gamma(n) / 2.0);
        }
        scaled_log_fermi_integral(n, self.alpha, &self.t_breaks(&[]), &self.spec)
    }

    /// `T_n(0) = 2 ∫_0^∞ K(t) t^n dt`, i.e. `∫ t^n ln(1+e^{α-t²}) dt / l0`.
    pub fn raw_moment(&self, n: usize) -> f64 {
        self.raw_moments[n]
    }

    /// `ln(1 + e^{α - μ²})`, the unnormalized kernel weight.
    pub fn log_weight(&self, mu: f64) -> f64 {
        log1p_exp(self.alpha - mu * mu)
    }

    /// `K_F(μ, α)`.
    pub fn kernel(&self, mu: f64) -> f64 {
        if self.is_maxwell() {
            return maxwell_kernel(mu);
        }
        self.log_weight(mu) / (2.0 * self.l0)
    }

    /// Break points for t-integrals of the kernel on `[0, cutoff]`: the Fermi
    /// edge `√α` when it lies inside, plus any caller-supplied scales.
    pub fn t_breaks(&self, extra: &[f64]) -> Vec<f64> {
        let mut pts = Vec::with_capacity(extra.len() + 3);
        if self.alpha > 0.0 && !self.is_maxwell() {
            let edge = self.alpha.sqrt();
            pts.push(edge);
            // the kernel bends over a width ~ 1/√α around the edge
            let w = 2.0 / edge.max(1.0);
            pts.push((edge - w).max(0.0));
            pts.push(edge + w);
        }
        pts.extend_from_slice(extra);
        crate::quadrature::merge_breaks(0.0, self.cutoff, &pts)
    }
}

/// `l_n^F(α) = ∫_0^∞ t^n ln(1 + e^{α - t²}) dt` for `n ∈ {0, 1, 2}`.
pub fn log_fermi_moment(n: usize, alpha: f64) -> Result<f64> {
    if n > 2 {
        return domain(format!("log-Fermi moment order must be 0, 1 or 2, got {n}"));
    }
    if !alpha.is_finite() {
        return domain(format!("alpha must be finite, got {alpha}"));
    }
    let cutoff = SemiInfiniteDomain::log_fermi(alpha).cutoff;
    let mut pts = vec![0.0, cutoff];
    if alpha > 0.0 && alpha.sqrt() < cutoff {
        pts.insert(1, alpha.sqrt());
    }
    scaled_log_fermi_integral(n, alpha, &pts, &QuadratureSpec::default())
}

// ∫ t^n ln(1+e^{α-t²}) dt with e^α factored out for α < 0, so the relative
// tolerance governs even when the weight itself is ~e^α.
fn scaled_log_fermi_integral(n: usize, alpha: f64, pts: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    if alpha >= 0.0 {
        return integrate_with_breaks(|t| t.powi(n as i32) * log1p_exp(alpha - t * t), pts, spec);
    }
    // ln(1 + e^α y) / e^α with y = e^{-t²}
    let ea = alpha.exp();
    let v = integrate_with_breaks(
        |t| {
            let y = (-t * t).exp();
            t.powi(n as i32) * (ea * y).ln_1p() / ea
        },
        pts,
        spec,
    )?;
    Ok(v * ea)
}

/// `K_F(μ, α)` for the context's `α`.
pub fn kernel(mu: f64, ctx: &KernelContext) -> f64 {
    ctx.kernel(mu)
}

/// Classical limit `e^{-μ²}/√π`.
pub fn maxwell_kernel(mu: f64) -> f64 {
    (-mu * mu).exp() / PI.sqrt()
}

/// Degenerate limit `(3/4)(1 - μ²)` on `|μ| ≤ 1` (rescaled speed).
pub fn degenerate_kernel(mu: f64) -> Result<f64> {
    if !(mu.abs() <= 1.0) {
        return domain(format!("degenerate kernel is defined for |mu| <= 1, got {mu}"));
    }
    Ok(0.75 * (1.0 - mu * mu))
}
