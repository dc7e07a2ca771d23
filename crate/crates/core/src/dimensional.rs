//! Dimensional slip: viscosity, mean free path and the isothermal slip
//! coefficient in SI units.
//!
//! ```text
//! β    = m/(2kT),  ρ = N m
//! η    = ρ/(νβ) · l_2/l_0
//! l    = η √(πβ) / ρ
//! K_v  = C(q, α) l_0/(√π l_2)
//! u_sl = K_v l g_v
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernel::KernelContext;
use crate::neumann::{build_series, NeumannSeries, SolverConfig};

/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    /// Particle mass, kg.
    pub mass: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Collision frequency ν, 1/s.
    pub collision_frequency: f64,
    /// Number density, 1/m³. Derived from `spin` and `α` when absent.
    pub number_density: Option<f64>,
    /// Particle spin s (half-integer).
    pub spin: Option<f64>,
    /// Far-field velocity gradient g_v, 1/s.
    pub gradient: f64,
}

impl GasParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
            Ok(())
        };
        positive(self.mass, "mass")?;
        positive(self.temperature, "temperature")?;
        positive(self.collision_frequency, "collision frequency")?;
        if let Some(n) = self.number_density {
            positive(n, "number density")?;
        }
        if let Some(s) = self.spin {
            if !(s >= 0.0 && (2.0 * s).fract() == 0.0) {
                return domain(format!("spin must be a non-negative half-integer, got {s}"));
            }
        }
        if !self.gradient.is_finite() {
            return domain(format!("gradient must be finite, got {}", self.gradient));
        }
        Ok(())
    }

    /// `β = m/(2kT)`, s²/m².
    pub fn beta(&self) -> f64 {
        self.mass / (2.0 * BOLTZMANN * self.temperature)
    }

    /// Number density, given or derived from the spin degeneracy.
    pub fn number_density(&self, ctx: &KernelContext) -> Result<f64> {
        match (self.number_density, self.spin) {
            (Some(n), _) => Ok(n),
            (None, Some(s)) => Ok(derived_number_density(self.mass, self.temperature, s, ctx)),
            (None, None) => Err(Error::MissingDensity),
        }
    }

    /// Mass density `ρ = N m`, kg/m³.
    pub fn mass_density(&self, ctx: &KernelContext) -> Result<f64> {
        Ok(self.number_density(ctx)? * self.mass)
    }
}

/// `N = 2π(2s+1) m³ l_0 / ((2πħ)³ β^{3/2})`.
pub fn derived_number_density(mass: f64, temperature: f64, spin: f64, ctx: &KernelContext) -> f64 {
    let beta = mass / (2.0 * BOLTZMANN * temperature);
    2.0 * PI * (2.0 * spin + 1.0) * mass.powi(3) * ctx.l0 / ((2.0 * PI * HBAR).powi(3) * beta.powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalResult {
    #[serde(rename = "eta_Pa_s")]
    pub viscosity: f64,
    #[serde(rename = "mfp_m")]
    pub mean_free_path: f64,
    #[serde(rename = "Kv")]
    pub k_v: f64,
    #[serde(rename = "u_sl_m_per_s")]
    pub u_sl: f64,
}

/// `η = ρ/(νβ) · l_2/l_0`, Pa·s.
pub fn viscosity(params: &GasParameters, ctx: &KernelContext) -> Result<f64> {
    params.validate()?;
    let rho = params.mass_density(ctx)?;
    Ok(rho / (params.collision_frequency * params.beta()) * ctx.l2 / ctx.l0)
}

/// `l = η √(πβ)/ρ`, m.
pub fn mean_free_path(params: &GasParameters, ctx: &KernelContext) -> Result<f64> {
    let eta = viscosity(params, ctx)?;
    let rho = params.mass_density(ctx)?;
    Ok(eta * (PI * params.beta()).sqrt() / rho)
}

/// `K_v = C l_0/(√π l_2)` from a prepared series.
pub fn slip_coefficient_from(series: &NeumannSeries, q: f64) -> Result<f64> {
    let ctx = series.ctx();
    Ok(series.series_factor(q)? * ctx.l0 / (PI.sqrt() * ctx.l2))
}

/// `K_v(α, q)` at the given order with the default discretization.
pub fn slip_coefficient(alpha: f64, q: f64, order: usize) -> Result<f64> {
    slip_coefficient_from(&build_series(alpha, order, &SolverConfig::default())?, q)
}

/// The full chain from a prepared series.
pub fn dimensional_slip_from(params: &GasParameters, series: &NeumannSeries, q: f64) -> Result<DimensionalResult> {
    let ctx = series.ctx();
    let viscosity = viscosity(params, ctx)?;
    let mean_free_path = mean_free_path(params, ctx)?;
    let k_v = slip_coefficient_from(series, q)?;
    Ok(DimensionalResult {
        viscosity,
        mean_free_path,
        k_v,
        u_sl: k_v * mean_free_path * params.gradient,
    })
}

/// `η`, `l`, `K_v` and `u_sl = K_v l g_v` for a gas at `(α, q)`.
pub fn dimensional_slip(params: &GasParameters, alpha: f64, q: f64, order: usize) -> Result<DimensionalResult> {
    params.validate()?;
    let series = build_series(alpha, order, &SolverConfig::default())?;
    dimensional_slip_from(params, &series, q)
}

/// Slip straight from the dimensionless one: `u_sl = C g_v/(ν √β)`.
pub fn slip_from_dimensionless(params: &GasParameters, c: f64) -> f64 {
    c * params.gradient / (params.collision_frequency * params.beta().sqrt())
}
