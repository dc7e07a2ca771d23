//! Successive approximations in the diffuseness `q`.
//!
//! With `E(k) = 2(2-q) G_v Σ q^n E_n(k)` and
//! `U_sl = G_v (2-q)/q Σ U_n q^n`, removing the double pole of `1/L(k)` at
//! `k = 0` order by order gives
//!
//! ```text
//! U_0    = T_2(0)/T_1(0)
//! E_0(k) = φ_0(k)/T_2(k),  φ_0 = [T_2(0) T_3(k) - T_1(0) T_4(k)] / T_1(0)
//! U_n    = -1/(π T_1(0)) ∫_0^∞ T_1(k) E_{n-1}(k) dk
//! E_n(k) = -1/(π T_2(k)) ∫_0^∞ S(k, k1) E_{n-1}(k1) dk1
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernel::KernelContext;
use crate::moments::{moment_t, GridConfig, KGrid, MomentCache};
use crate::quadrature::QuadratureSpec;
use crate::spectral::SpectralDensity;

/// Default number of corrections past `U_0`.
pub const DEFAULT_ORDER: usize = 3;

/// Discretization and tolerance settings for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SolverConfig {
    pub grid: GridConfig,
    pub quad: QuadratureSpec,
}

impl SolverConfig {
    /// Twice the panels and half the tolerances.
    pub fn refined(&self) -> Self {
        Self {
            grid: self.grid.refined(),
            quad: self.quad.scaled(0.5),
        }
    }
}

/// `U_0 = l_2/l_1`.
pub fn u0(ctx: &KernelContext) -> f64 {
    ctx.l2 / ctx.l1
}

/// `φ_0(k) = [T_2(0) T_3(k) - T_1(0) T_4(k)] / T_1(0)`.
pub fn phi0(k: f64, ctx: &KernelContext) -> Result<f64> {
    let (t1_0, t2_0) = (ctx.raw_moment(1), ctx.raw_moment(2));
    Ok((t2_0 * moment_t(3, k, ctx)? - t1_0 * moment_t(4, k, ctx)?) / t1_0)
}

/// `E_0(k) = φ_0(k)/T_2(k)`, finite at `k = 0`.
pub fn e0(k: f64, ctx: &KernelContext) -> Result<f64> {
    Ok(phi0(k, ctx)? / moment_t(2, k, ctx)?)
}

/// The recursion operator on a fixed grid: cached moments plus the S-matrix.
#[derive(Debug, Clone)]
pub struct NeumannOperator {
    cache: MomentCache,
    s: Vec<f64>,
    s_at_zero: Vec<f64>,
}

impl NeumannOperator {
    pub fn new(cache: MomentCache) -> Result<Self> {
        let s = cache.s_matrix()?;
        let s_at_zero = cache.s_row(0.0)?;
        Ok(Self { cache, s, s_at_zero })
    }

    pub fn cache(&self) -> &MomentCache {
        &self.cache
    }

    pub fn grid(&self) -> &KGrid {
        &self.cache.grid
    }

    /// `E_0` sampled on the grid, as a spectral density.
    pub fn zeroth(&self) -> SpectralDensity {
        let c = &self.cache;
        let (t1_0, t2_0) = (c.t_at_zero(1), c.t_at_zero(2));
        let values = (0..c.grid.len())
            .map(|i| (t2_0 * c.t(3)[i] - t1_0 * c.t(4)[i]) / (t1_0 * c.t(2)[i]))
            .collect();
        let at_zero = (t2_0 * c.t_at_zero(3) - t1_0 * c.t_at_zero(4)) / (t1_0 * t2_0);
        SpectralDensity::new(&c.grid, values, at_zero)
    }

    /// One step of the recursion: `(U_n, E_n)` from `E_{n-1}`.
    pub fn step(&self, prev: &SpectralDensity) -> Result<(f64, SpectralDensity)> {
        let c = &self.cache;
        let grid = &c.grid;
        let m = grid.len();
        let weighted: Vec<f64> = grid
            .weights
            .iter()
            .zip(prev.on_grid())
            .map(|(w, e)| w * e)
            .collect();

        let moment: f64 = weighted.iter().zip(c.t(1)).map(|(we, t1)| we * t1).sum();
        self.check_tail(prev, moment)?;
        let t1_0 = c.t_at_zero(1);
        let u = -moment / (PI * t1_0);

        let values: Vec<f64> = (0..m)
            .map(|i| {
                let row = &self.s[i * m..(i + 1) * m];
                let acc: f64 = row.iter().zip(&weighted).map(|(s, we)| s * we).sum();
                -acc / (PI * c.t(2)[i])
            })
            .collect();
        let acc0: f64 = self.s_at_zero.iter().zip(&weighted).map(|(s, we)| s * we).sum();
        let at_zero = -acc0 / (PI * c.t_at_zero(2));
        Ok((u, SpectralDensity::new(grid, values, at_zero)))
    }

    // Rough size of ∫_{k_max}^∞ T_1 E dk against the grid part: both factors
    // fall like ln k/k², so the tail is about T_1(K) E(K) K / 3.
    fn check_tail(&self, prev: &SpectralDensity, moment: f64) -> Result<()> {
        let c = &self.cache;
        let last = c.grid.len() - 1;
        let k = c.grid.nodes[last];
        let tail = (c.t(1)[last] * prev.on_grid()[last] * k / 3.0).abs();
        if tail > 1e-3 * moment.abs() && tail > 1e-12 {
            return Err(Error::GridTooCoarse(format!(
                "tail beyond k_max = {} is {tail:.2e} against a grid integral of {moment:.2e}",
                c.grid.k_max
            )));
        }
        Ok(())
    }
}

/// Free-function form of [`NeumannOperator::step`].
pub fn neumann_step(prev: &SpectralDensity, op: &NeumannOperator) -> Result<(f64, SpectralDensity)> {
    op.step(prev)
}

/// Coefficients `U_0 … U_N` and densities `E_0 … E_N` for one `α`.
#[derive(Debug, Clone)]
pub struct NeumannSeries {
    pub alpha: f64,
    pub order: usize,
    pub u: Vec<f64>,
    pub densities: Vec<SpectralDensity>,
    pub config: SolverConfig,
    operator: NeumannOperator,
}

/// Series factor `C(q) = (2-q)/q Σ_{n ≤ order} U_n q^n`.
pub fn series_factor(u: &[f64], q: f64) -> f64 {
    (2.0 - q) / q * u.iter().rev().fold(0.0, |acc, un| acc * q + un)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return domain(format!(
            "diffuseness q must lie in (0, 1], got {q} (q = 0 gives unbounded slip)"
        ));
    }
    Ok(())
}

impl NeumannSeries {
    pub fn ctx(&self) -> &KernelContext {
        &self.operator.cache().ctx
    }

    pub fn cache(&self) -> &MomentCache {
        self.operator.cache()
    }

    pub fn grid(&self) -> &KGrid {
        self.operator.grid()
    }

    pub fn operator(&self) -> &NeumannOperator {
        &self.operator
    }

    pub fn density(&self, n: usize) -> &SpectralDensity {
        &self.densities[n]
    }

    /// Extend the series by one order.
    pub fn extend(&mut self) -> Result<()> {
        let (u, e) = self.operator.step(self.densities.last().expect("E_0 always present"))?;
        self.u.push(u);
        self.densities.push(e);
        self.order += 1;
        Ok(())
    }

    /// `C(q, α)` using every computed order.
    pub fn series_factor(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        Ok(series_factor(&self.u, q))
    }

    /// `C(q)` truncated after each order `0..=order`.
    pub fn partial_sums(&self, q: f64) -> Result<Vec<f64>> {
        check_q(q)?;
        Ok((0..=self.order).map(|n| series_factor(&self.u[..=n], q)).collect())
    }

    pub fn slip(&self, q: f64) -> Result<SlipSolution> {
        let partials = self.partial_sums(q)?;
        Ok(SlipSolution {
            alpha: self.alpha,
            q,
            order: self.order,
            coefficients: self.u.clone(),
            c: partials[self.order],
            partials,
            exact_reference: None,
        })
    }
}

/// Build the series to `order` for `alpha` on the given discretization.
pub fn build_series(alpha: f64, order: usize, config: &SolverConfig) -> Result<NeumannSeries> {
    let ctx = KernelContext::with_spec(alpha, config.quad)?;
    let grid = KGrid::new(config.grid)?;
    let cache = MomentCache::new(ctx, grid)?;
    let operator = NeumannOperator::new(cache)?;
    let mut series = NeumannSeries {
        alpha,
        order: 0,
        u: vec![u0(&operator.cache().ctx)],
        densities: vec![operator.zeroth()],
        config: *config,
        operator,
    };
    for _ in 0..order {
        series.extend()?;
    }
    Ok(series)
}

/// Rebuild on the refined discretization and fail with `GridTooCoarse` when
/// any coefficient moves by `tolerance` or more.
pub fn verify_resolution(series: &NeumannSeries, tolerance: f64) -> Result<Vec<f64>> {
    let fine = build_series(series.alpha, series.order, &series.config.refined())?;
    let shifts: Vec<f64> = series.u.iter().zip(&fine.u).map(|(a, b)| (a - b).abs()).collect();
    if let Some((n, d)) = shifts.iter().enumerate().find(|(_, d)| **d >= tolerance) {
        return Err(Error::GridTooCoarse(format!(
            "U_{n} moves by {d:.2e} when the grid is doubled"
        )));
    }
    Ok(shifts)
}

/// Dimensionless slip `U_sl/G_v` with its per-order partial sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlipSolution {
    pub alpha: f64,
    pub q: f64,
    pub order: usize,
    pub coefficients: Vec<f64>,
    /// `C(q, α) = U_sl/G_v`.
    pub c: f64,
    pub partials: Vec<f64>,
    pub exact_reference: Option<f64>,
}

impl SlipSolution {
    /// Gradient `G_v` that produces the slip `u_sl`.
    pub fn invert(&self, u_sl: f64) -> Result<f64> {
        if self.c.abs() < 1e-12 {
            return Err(Error::DegenerateSeries(self.c));
        }
        Ok(u_sl / self.c)
    }

    /// Relative error of each partial sum against the exact reference, in percent.
    pub fn relative_errors(&self) -> Option<Vec<f64>> {
        let exact = self.exact_reference?;
        Some(self.partials.iter().map(|p| (exact - p) / exact * 100.0).collect())
    }
}

/// `U_sl/G_v` for `(α, q)` at the given order with the default discretization.
pub fn slip_velocity(alpha: f64, q: f64, order: usize) -> Result<SlipSolution> {
    check_q(q)?;
    build_series(alpha, order, &SolverConfig::default())?.slip(q)
}

/// Inverse problem: far-field gradient `G_v = u_sl / C(q, α)`.
pub fn inverse_kramers(u_sl: f64, alpha: f64, q: f64, order: usize) -> Result<f64> {
    slip_velocity(alpha, q, order)?.invert(u_sl)
}
