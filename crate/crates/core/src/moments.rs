//! Moment functions of the kernel along the Fourier variable `k`.
//!
//! ```text
//! T_n(k)      = 2 ∫_0^∞ K(t) t^n / (1 + k²t²) dt
//! L(k)        = k² T_2(k) = 1 - T_0(k)
//! J_n(k, k1)  = 2 ∫_0^∞ K(t) t^n / ((1 + k²t²)(1 + k1²t²)) dt,   J = J_1
//! S(k, k1)    = k1² [J_5(k, k1) - T_3(k) T_3(k1) / T_1(0)]
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernel::{KernelContext, MAX_RAW_MOMENT};
use crate::quadrature::{gauss_legendre, integrate_with_breaks};

/// Below this `k` the moments use their Taylor expansion about `k = 0`.
pub const TAYLOR_K: f64 = 1e-3;

/// Layout of the spectral grid: one panel on `[0, k_min]`, then geometric
/// panels up to `k_max`, with Gauss–Legendre nodes inside each panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub panels: usize,
    pub points_per_panel: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            k_min: 1e-3,
            k_max: 1000.0,
            panels: 30,
            points_per_panel: 8,
        }
    }
}

impl GridConfig {
    /// Default layout resized to hold (at least) `nodes` nodes.
    pub fn with_nodes(nodes: usize) -> Self {
        let base = Self::default();
        Self {
            panels: nodes.div_ceil(base.points_per_panel).max(2),
            ..base
        }
    }

    pub fn nodes(&self) -> usize {
        self.panels * self.points_per_panel
    }

    /// Same range with twice as many panels.
    pub fn refined(&self) -> Self {
        Self {
            panels: 2 * self.panels,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_min > 0.0 && self.k_max > self.k_min && self.panels >= 2 && self.points_per_panel >= 1) {
            return Err(Error::InvalidConfig(format!("bad k-grid layout {self:?}")));
        }
        Ok(())
    }
}

/// Quadrature nodes and weights for `∫_0^{k_max} dk`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Panel boundaries, `0 = edges[0] < … < edges[panels] = k_max`.
    pub edges: Vec<f64>,
    pub k_max: f64,
    pub config: GridConfig,
}

impl KGrid {
    pub fn new(config: GridConfig) -> Result<Self> {
        config.validate()?;
        let mut edges = vec![0.0, config.k_min];
        let ratio = (config.k_max / config.k_min).powf(1.0 / (config.panels - 1) as f64);
        for i in 1..config.panels {
            edges.push(if i + 1 == config.panels {
                config.k_max
            } else {
                config.k_min * ratio.powi(i as i32)
            });
        }
        let (x, w) = gauss_legendre(config.points_per_panel);
        let mut nodes = Vec::with_capacity(config.nodes());
        let mut weights = Vec::with_capacity(config.nodes());
        for e in edges.windows(2) {
            let half = 0.5 * (e[1] - e[0]);
            let mid = 0.5 * (e[1] + e[0]);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Ok(Self {
            nodes,
            weights,
            edges,
            k_max: config.k_max,
            config,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(k_i)`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

fn k_breaks(ks: &[f64]) -> Vec<f64> {
    let mut pts = Vec::new();
    for &k in ks {
        if k > 0.0 {
            pts.extend_from_slice(&[0.1 / k, 1.0 / k, 10.0 / k]);
        }
    }
    pts
}

fn direct_moment(n: usize, k: f64, ctx: &KernelContext) -> Result<f64> {
    let pts = ctx.t_breaks(&k_breaks(&[k]));
    let k2 = k * k;
    let v = integrate_with_breaks(
        |t| ctx.kernel(t) * t.powi(n as i32) / (1.0 + k2 * t * t),
        &pts,
        ctx.spec(),
    )?;
    Ok(2.0 * v)
}

/// `T_n(k)`; exact closed moments at `k = 0`, Taylor form below [`TAYLOR_K`].
pub fn moment_t(n: usize, k: f64, ctx: &KernelContext) -> Result<f64> {
    if !(k >= 0.0 && k.is_finite()) {
        return domain(format!("T_n(k) needs finite k >= 0, got {k}"));
    }
    if n > MAX_RAW_MOMENT {
        return domain(format!("moment order {n} above {MAX_RAW_MOMENT}"));
    }
    if k == 0.0 {
        return Ok(ctx.raw_moment(n));
    }
    if k < TAYLOR_K && n + 4 <= MAX_RAW_MOMENT {
        let k2 = k * k;
        return Ok(ctx.raw_moment(n) - k2 * ctx.raw_moment(n + 2) + k2 * k2 * ctx.raw_moment(n + 4));
    }
    direct_moment(n, k, ctx)
}

/// `L(k) = k² T_2(k)`.
pub fn dispersion_l(k: f64, ctx: &KernelContext) -> Result<f64> {
    Ok(k * k * moment_t(2, k, ctx)?)
}

fn pair_moment(n: usize, k: f64, k1: f64, ctx: &KernelContext) -> Result<f64> {
    if !(k >= 0.0 && k1 >= 0.0 && k.is_finite() && k1.is_finite()) {
        return domain(format!("coupling integrals need finite k, k1 >= 0, got ({k}, {k1})"));
    }
    let pts = ctx.t_breaks(&k_breaks(&[k, k1]));
    let (a, b) = (k * k, k1 * k1);
    let v = integrate_with_breaks(
        |t| {
            let t2 = t * t;
            ctx.kernel(t) * t.powi(n as i32) / ((1.0 + a * t2) * (1.0 + b * t2))
        },
        &pts,
        ctx.spec(),
    )?;
    Ok(2.0 * v)
}

/// `J(k, k1) = J_1(k, k1)`.
pub fn coupling_j(k: f64, k1: f64, ctx: &KernelContext) -> Result<f64> {
    pair_moment(1, k, k1, ctx)
}

/// `J_n(k, k1)` for `n ∈ {3, 5}`.
pub fn coupling_jn(n: usize, k: f64, k1: f64, ctx: &KernelContext) -> Result<f64> {
    if n != 3 && n != 5 {
        return domain(format!("J_n is defined for n = 3 or 5, got {n}"));
    }
    pair_moment(n, k, k1, ctx)
}

/// `S(k, k1) = k1² [J_5(k, k1) - T_3(k) T_3(k1)/T_1(0)]`.
///
/// For `k > 1` the equivalent form `(k1²/k²)[T_1(k) T_3(k1)/T_1(0) - J_3(k, k1)]`
/// is used: the two terms of the first form cancel to leading order in `1/k²`.
pub fn kernel_s(k: f64, k1: f64, ctx: &KernelContext) -> Result<f64> {
    let t3_k1 = moment_t(3, k1, ctx)?;
    let (t1_k, t3_k) = if k > 1.0 {
        (moment_t(1, k, ctx)?, 0.0)
    } else {
        (0.0, moment_t(3, k, ctx)?)
    };
    kernel_s_with(k, k1, t1_k, t3_k, t3_k1, ctx)
}

// S(k, k1) given the single-argument moments it needs (T_1(k) when k > 1,
// T_3(k) otherwise, and T_3(k1)).
fn kernel_s_with(k: f64, k1: f64, t1_k: f64, t3_k: f64, t3_k1: f64, ctx: &KernelContext) -> Result<f64> {
    let t1_0 = ctx.raw_moment(1);
    if k1 == 0.0 {
        return Ok(0.0);
    }
    if k > 1.0 {
        let j3 = pair_moment(3, k, k1, ctx)?;
        Ok(k1 * k1 / (k * k) * (t1_k * t3_k1 / t1_0 - j3))
    } else {
        let j5 = pair_moment(5, k, k1, ctx)?;
        Ok(k1 * k1 * (j5 - t3_k * t3_k1 / t1_0))
    }
}

/// `T_0 … T_4` tabulated on a [`KGrid`].
#[derive(Debug, Clone)]
pub struct MomentCache {
    pub ctx: KernelContext,
    pub grid: KGrid,
    /// `table[n][i] = T_n(k_i)`.
    table: Vec<Vec<f64>>,
}

impl MomentCache {
    pub fn new(ctx: KernelContext, grid: KGrid) -> Result<Self> {
        let rows: Vec<[f64; 5]> = grid
            .nodes
            .par_iter()
            .map(|&k| {
                let mut row = [0.0; 5];
                for (n, v) in row.iter_mut().enumerate() {
                    *v = moment_t(n, k, &ctx)?;
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let table = (0..5).map(|n| rows.iter().map(|r| r[n]).collect()).collect();
        Ok(Self { ctx, grid, table })
    }

    /// `T_n` at every grid node, `n ≤ 4`.
    pub fn t(&self, n: usize) -> &[f64] {
        &self.table[n]
    }

    /// `T_n(0)`.
    pub fn t_at_zero(&self, n: usize) -> f64 {
        self.ctx.raw_moment(n)
    }

    /// `L(k_i) = k_i² T_2(k_i)` on the grid.
    pub fn dispersion(&self) -> Vec<f64> {
        self.grid
            .nodes
            .iter()
            .zip(self.t(2))
            .map(|(k, t2)| k * k * t2)
            .collect()
    }

    /// Largest `|(1 - T_0) - k² T_2| / max(1, k² T_2)` over the grid.
    pub fn dispersion_residual(&self) -> f64 {
        self.grid
            .nodes
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let l = k * k * self.table[2][i];
                ((1.0 - self.table[0][i]) - l).abs() / l.max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// `S(k, k_j)` for every grid node `k_j`, reusing the tabulated moments.
    pub fn s_row(&self, k: f64) -> Result<Vec<f64>> {
        let (t1_k, t3_k) = if k > 1.0 {
            (moment_t(1, k, &self.ctx)?, 0.0)
        } else {
            (0.0, moment_t(3, k, &self.ctx)?)
        };
        self.grid
            .nodes
            .iter()
            .zip(self.t(3))
            .map(|(&k1, &t3_k1)| kernel_s_with(k, k1, t1_k, t3_k, t3_k1, &self.ctx))
            .collect()
    }

    /// Row `i` of the S-matrix, using the cached `T_1`/`T_3` at node `i`.
    fn s_row_at(&self, i: usize) -> Result<Vec<f64>> {
        let k = self.grid.nodes[i];
        let (t1_k, t3_k) = (self.table[1][i], self.table[3][i]);
        self.grid
            .nodes
            .iter()
            .zip(self.t(3))
            .map(|(&k1, &t3_k1)| kernel_s_with(k, k1, t1_k, t3_k, t3_k1, &self.ctx))
            .collect()
    }

    /// Dense `S(k_i, k_j)`, row-major, assembled in parallel over rows.
    pub fn s_matrix(&self) -> Result<Vec<f64>> {
        let rows: Vec<Vec<f64>> = (0..self.grid.len())
            .into_par_iter()
            .map(|i| self.s_row_at(i))
            .collect::<Result<_>>()?;
        Ok(rows.concat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn maxwell() -> KernelContext {
        KernelContext::new(-30.0).unwrap()
    }

    #[test]
    fn closed_moments_at_zero() {
        let ctx = maxwell();
        assert_eq!(moment_t(0, 0.0, &ctx).unwrap(), 1.0);
        assert_abs_diff_eq!(moment_t(1, 0.0, &ctx).unwrap(), 1.0 / PI.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(moment_t(2, 0.0, &ctx).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn taylor_branch_is_continuous() {
        for alpha in [-30.0, 0.0, 3.0] {
            let ctx = KernelContext::new(alpha).unwrap();
            for n in 0..5 {
                let below = moment_t(n, TAYLOR_K * (1.0 - 1e-9), &ctx).unwrap();
                let direct = direct_moment(n, TAYLOR_K, &ctx).unwrap();
                assert_abs_diff_eq!(below, direct, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn dispersion_examples() {
        let ctx = maxwell();
        assert_eq!(dispersion_l(0.0, &ctx).unwrap(), 0.0);
        // T_0(k) ≈ √π/k at large k in the Maxwell limit, so L(100) ≈ 0.982
        let l100 = 1.0 - moment_t(0, 100.0, &ctx).unwrap();
        let brute = {
            let n = 400_000;
            let h = ctx.cutoff / n as f64;
            1.0 - 2.0
                * (0..n)
                    .map(|i| {
                        let t = (i as f64 + 0.5) * h;
                        ctx.kernel(t) / (1.0 + 1e4 * t * t) * h
                    })
                    .sum::<f64>()
        };
        assert_abs_diff_eq!(l100, brute, epsilon = 1e-8);
        assert!(l100 > 0.98 && l100 < 1.0);
        assert_abs_diff_eq!(l100, 1.0 - PI.sqrt() / 100.0, epsilon = 5e-4);
        let l1 = dispersion_l(1.0, &ctx).unwrap();
        assert!((l1 - (1.0 - moment_t(0, 1.0, &ctx).unwrap())).abs() < 1e-9);
    }

    #[test]
    fn coupling_examples() {
        let ctx = maxwell();
        for k in [0.0, 1.0, 5.0] {
            assert_abs_diff_eq!(
                coupling_j(k, 0.0, &ctx).unwrap(),
                moment_t(1, k, &ctx).unwrap(),
                epsilon = 1e-11
            );
        }
        assert_abs_diff_eq!(coupling_j(0.0, 0.0, &ctx).unwrap(), ctx.l1 / ctx.l0, epsilon = 1e-10);
        assert_abs_diff_eq!(coupling_j(2.0, 3.0, &ctx).unwrap(), coupling_j(3.0, 2.0, &ctx).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            coupling_jn(3, 1.7, 0.0, &ctx).unwrap(),
            moment_t(3, 1.7, &ctx).unwrap(),
            epsilon = 1e-11
        );
        // J_5(0,0) = 2∫K t^5 dt = Γ(3)/√π in the Maxwell limit
        assert_abs_diff_eq!(coupling_jn(5, 0.0, 0.0, &ctx).unwrap(), 2.0 / PI.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(coupling_jn(5, 1.0, 2.0, &ctx).unwrap(), coupling_jn(5, 2.0, 1.0, &ctx).unwrap(), epsilon = 1e-12);
        assert!(coupling_jn(4, 1.0, 1.0, &ctx).is_err());
    }

    #[test]
    fn s_identity_and_symmetry() {
        let ctx = maxwell();
        assert_eq!(kernel_s(1.3, 0.0, &ctx).unwrap(), 0.0);
        let (k, k1) = (0.7, 1.3);
        let lhs = coupling_j(k, k1, &ctx).unwrap()
            - moment_t(1, k, &ctx).unwrap() * moment_t(1, k1, &ctx).unwrap() / ctx.raw_moment(1);
        assert_abs_diff_eq!(lhs, k * k * kernel_s(k, k1, &ctx).unwrap(), epsilon = 1e-9);
        for (a, b) in [(0.3, 2.5), (4.0, 0.2), (12.0, 30.0)] {
            let ab = a * a * kernel_s(a, b, &ctx).unwrap();
            let ba = b * b * kernel_s(b, a, &ctx).unwrap();
            assert_abs_diff_eq!(ab, ba, epsilon = 1e-10);
        }
    }

    #[test]
    fn grid_layout() {
        let g = KGrid::new(GridConfig::default()).unwrap();
        assert_eq!(g.len(), 240);
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes[0] > 0.0 && g.weights.iter().all(|w| *w > 0.0));
        let total: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(total, 1000.0, epsilon = 1e-9);
        assert!(KGrid::new(GridConfig { panels: 1, ..GridConfig::default() }).is_err());
    }

    #[test]
    fn cache_invariants() {
        let ctx = KernelContext::new(0.0).unwrap();
        let grid = KGrid::new(GridConfig::with_nodes(80)).unwrap();
        let cache = MomentCache::new(ctx, grid).unwrap();
        assert!(cache.dispersion_residual() < 1e-9);
        for n in 0..5 {
            let t = cache.t(n);
            assert!(t.iter().all(|v| *v > 0.0));
            assert!(t.windows(2).all(|w| w[1] < w[0]), "T_{n} not decreasing");
        }
    }
}
