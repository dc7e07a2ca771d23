//! Quick invariant checks, cheap enough to run from the command line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{exact_slip_with, exact_wall_velocity};
use crate::kernel::{maxwell_kernel, KernelContext};
use crate::moments::{coupling_j, kernel_s, moment_t};
use crate::neumann::{build_series, SolverConfig};
use crate::profile::wall_velocity;
use crate::quadrature::integrate_with_breaks;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value.is_finite() && value.abs() <= tolerance,
            detail: format!("deviation {value:.3e} (tolerance {tolerance:.0e})"),
        }
    }
}

/// Run every check with the given discretization.
pub fn run_checks(config: &SolverConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for alpha in [-30.0, -5.0, 0.0, 2.0, 10.0] {
        let ctx = KernelContext::with_spec(alpha, config.quad)?;
        let half = integrate_with_breaks(|t| ctx.kernel(t), &ctx.t_breaks(&[]), ctx.spec())?;
        worst = worst.max((2.0 * half - 1.0).abs());
    }
    out.push(Check::new("kernel normalization", worst, 1e-9));

    let ctx = KernelContext::with_spec(-30.0, config.quad)?;
    let worst = (0..=400)
        .map(|i| (ctx.kernel(i as f64 * 0.01) - maxwell_kernel(i as f64 * 0.01)).abs())
        .fold(0.0, f64::max);
    out.push(Check::new("Maxwell limit of the kernel", worst, 1e-11));

    let mut worst: f64 = 0.0;
    for &(k, k1) in &[(0.4, 1.9), (2.5, 0.6), (7.0, 11.0)] {
        let lhs = coupling_j(k, k1, &ctx)? - moment_t(1, k, &ctx)? * moment_t(1, k1, &ctx)? / ctx.raw_moment(1);
        worst = worst.max((lhs - k * k * kernel_s(k, k1, &ctx)?).abs());
        worst = worst.max((k * k * kernel_s(k, k1, &ctx)? - k1 * k1 * kernel_s(k1, k, &ctx)?).abs());
    }
    out.push(Check::new("J/S identity and symmetry", worst, 1e-9));

    let series = build_series(-30.0, 3, config)?;
    out.push(Check::new(
        "dispersion residual on the grid",
        series.cache().dispersion_residual(),
        1e-9,
    ));
    out.push(Check::new("U_0 in the Maxwell limit", series.u[0] - PI.sqrt() / 2.0, 1e-9));

    let c = series.series_factor(1.0)?;
    let exact = exact_slip_with(&ctx)?;
    out.push(Check::new("Neumann slip against the phase integral", c - exact, 2e-3));

    let wall = wall_velocity(&series, 1.0, 2)?;
    out.push(Check::new(
        "wall velocity against sqrt(l2/l0)",
        wall - exact_wall_velocity(-30.0)?,
        2e-3,
    ));

    let sol = series.slip(0.7)?;
    let g = sol.invert(sol.c * 3.25)?;
    out.push(Check::new("inverse round trip", g / 3.25 - 1.0, 1e-12));

    Ok(out)
}
