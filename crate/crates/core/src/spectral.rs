//! Sampled spectral densities `E(k)` with interpolation and a fitted tail.
//!
//! Densities of the Neumann recursion decay like `(a ln k + b)/k²`; the two
//! coefficients are fitted at the end of the grid and carry the transform
//! past `k_max`.

use serde::{Deserialize, Serialize};

use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::interp::PanelLagrange;
use crate::moments::KGrid;
use crate::quadrature::{fourier_tail, gauss_legendre, QuadratureSpec, Trig};

// Largest span of `k x` per fixed-rule piece, and the rule used on it.
const PIECE_PHASE: f64 = 4.0;
const PIECE_POINTS: usize = 16;

fn piece_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PIECE_POINTS))
}

/// `E(k) ≈ (a ln k + b)/k²` beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogTail {
    pub a: f64,
    pub b: f64,
}

impl LogTail {
    /// Fit through `(k1, e1)` and `(k2, e2)`.
    pub fn fit(k1: f64, e1: f64, k2: f64, e2: f64) -> Self {
        let (y1, y2) = (k1 * k1 * e1, k2 * k2 * e2);
        let a = (y2 - y1) / (k2.ln() - k1.ln());
        let b = y1 - a * k1.ln();
        Self { a, b }
    }

    pub fn eval(&self, k: f64) -> f64 {
        (self.a * k.ln() + self.b) / (k * k)
    }

    /// `∫_K^∞ (a ln k + b)/k² dk`.
    pub fn integral_from(&self, k: f64) -> f64 {
        (self.a * (k.ln() + 1.0) + self.b) / k
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDensity {
    /// Values at the grid nodes (same order as the grid).
    values: Vec<f64>,
    at_zero: f64,
    k_max: f64,
    tail: LogTail,
    interp: PanelLagrange,
}

impl SpectralDensity {
    pub fn new(grid: &KGrid, values: Vec<f64>, at_zero: f64) -> Self {
        assert_eq!(values.len(), grid.len());
        let n = grid.len();
        let last = n - 1;
        let k_last = grid.nodes[last];
        let half = grid.nodes.partition_point(|&k| k <= 0.5 * k_last).saturating_sub(1);
        let tail = LogTail::fit(grid.nodes[half], values[half], k_last, values[last]);
        let interp = PanelLagrange::new(
            grid.edges.clone(),
            grid.nodes.clone(),
            values.clone(),
            grid.config.points_per_panel,
        );
        Self {
            values,
            at_zero,
            k_max: grid.k_max,
            tail,
            interp,
        }
    }

    pub fn on_grid(&self) -> &[f64] {
        &self.values
    }

    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    pub fn tail(&self) -> LogTail {
        self.tail
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// `E(k)` for any `k ≥ 0` (even extension for negative `k`).
    pub fn value(&self, k: f64) -> f64 {
        let k = k.abs();
        if k == 0.0 {
            self.at_zero
        } else if k > self.k_max {
            self.tail.eval(k)
        } else {
            self.interp.eval(k)
        }
    }

    /// `∫_0^∞ trig(k x) w(k) E(k) dk` for a smooth non-oscillating weight `w`.
    ///
    /// The interpolant is a polynomial on each grid panel, so each panel is
    /// cut into pieces spanning at most `PIECE_PHASE` radians of `k x` and
    /// integrated with a fixed Gauss–Legendre rule.
    pub fn transform<W: Fn(f64) -> f64>(
        &self,
        x: f64,
        w: W,
        trig: Trig,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if !(x >= 0.0 && x.is_finite()) {
            return domain(format!("transform needs finite x >= 0, got {x}"));
        }
        let (gx, gw) = piece_rule();
        let mut body = 0.0;
        for e in self.interp.edges().windows(2) {
            let pieces = ((e[1] - e[0]) * x / PIECE_PHASE).ceil().max(1.0) as usize;
            let h = (e[1] - e[0]) / pieces as f64;
            for p in 0..pieces {
                let mid = e[0] + (p as f64 + 0.5) * h;
                let mut acc = 0.0;
                for (xi, wi) in gx.iter().zip(gw) {
                    let k = mid + 0.5 * h * xi;
                    let t = match trig {
                        Trig::Cos => (k * x).cos(),
                        Trig::Sin => (k * x).sin(),
                    };
                    acc += wi * t * w(k) * self.interp.eval(k);
                }
                body += 0.5 * h * acc;
            }
        }
        let tail = self.tail;
        let rest = fourier_tail(|k| w(k) * tail.eval(k), self.k_max, x, trig, spec)?;
        Ok(body + rest)
    }

    /// `(1/π) ∫_0^∞ cos(k x) E(k) dk`.
    pub fn cosine_transform(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        if x == 0.0 {
            return Ok(self.full_integral(spec)? / std::f64::consts::PI);
        }
        Ok(self.transform(x, |_| 1.0, Trig::Cos, spec)? / std::f64::consts::PI)
    }

    /// `∫_0^∞ E(k) dk`, with the analytic tail.
    pub fn full_integral(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.transform(0.0, |_| 1.0, Trig::Cos, spec)
    }

    /// `∫_0^∞ w(k) E(k) dk` by the grid rule plus the fitted tail.
    pub fn grid_integral<W: Fn(f64) -> f64>(&self, grid: &KGrid, w: W, spec: &QuadratureSpec) -> Result<f64> {
        let body: f64 = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .zip(&self.values)
            .map(|((k, wt), e)| wt * w(*k) * e)
            .sum();
        let tail = self.tail;
        let rest = fourier_tail(|k| w(k) * tail.eval(k), self.k_max, 0.0, Trig::Cos, spec)?;
        Ok(body + rest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::GridConfig;
    use crate::quadrature::{integrate_with_breaks, merge_breaks, oscillation_panel, uniform_breaks};
    use approx::assert_abs_diff_eq;

    fn model(k: f64) -> f64 {
        // smooth, even, with the (a ln k + b)/k² tail shape
        (0.3 * (1.0 + k * k).ln() - 1.0) / (1.0 + k * k)
    }

    #[test]
    fn tail_fit_recovers_exact_form() {
        let t = LogTail::fit(100.0, (2.0 * 100f64.ln() + 3.0) / 1e4, 400.0, (2.0 * 400f64.ln() + 3.0) / 16e4);
        assert_abs_diff_eq!(t.a, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.b, 3.0, epsilon = 1e-11);
    }

    #[test]
    fn transforms_of_model_density() {
        let grid = KGrid::new(GridConfig::default()).unwrap();
        let values: Vec<f64> = grid.nodes.iter().map(|&k| model(k)).collect();
        let e = SpectralDensity::new(&grid, values, model(0.0));
        let spec = QuadratureSpec::default();
        // reference: direct adaptive integration of the model out to 1e7 plus its tail
        let reference = |x: f64| {
            let pts = merge_breaks(0.0, 2000.0, &uniform_breaks(0.0, 2000.0, oscillation_panel(x)));
            let s = QuadratureSpec { max_subdivisions: 100_000, ..spec };
            let body = integrate_with_breaks(|k| (k * x).cos() * model(k), &pts, &s).unwrap();
            let tail = fourier_tail(model, 2000.0, x, Trig::Cos, &spec).unwrap();
            (body + tail) / std::f64::consts::PI
        };
        for x in [0.0, 0.5, 2.0, 25.0] {
            let got = e.cosine_transform(x, &spec).unwrap();
            assert_abs_diff_eq!(got, reference(x), epsilon = 1e-8);
        }
        let by_grid = e.grid_integral(&grid, |_| 1.0, &spec).unwrap();
        let by_interp = e.full_integral(&spec).unwrap();
        assert_abs_diff_eq!(by_grid, by_interp, epsilon = 1e-8);
    }
}
