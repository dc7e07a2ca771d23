//! Adaptive Gauss–Kronrod integration plus the principal-value and
//! Fourier-cosine helpers built on it.
//!
//! Every integral in the crate goes through [`integrate_with_breaks`]: a
//! 7/15-point Gauss–Kronrod rule on each panel, bisecting the panel with the
//! largest error estimate until the global estimate drops below
//! `max(abs_tol, rel_tol * |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(Error::InvalidConfig(format!(
                "quadrature tolerances must be positive and max_subdivisions >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Same spec with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Finite stand-in for an infinite upper limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiInfiniteDomain {
    pub cutoff: f64,
    pub decay_note: String,
}

impl SemiInfiniteDomain {
    /// Cutoff for integrands weighted by `ln(1 + exp(alpha - t^2))`: the weight at
    /// the cutoff is `exp(-40)` relative to its scale.
    pub fn log_fermi(alpha: f64) -> Self {
        Self {
            cutoff: (alpha.max(0.0) + 40.0).sqrt(),
            decay_note: format!("ln(1+exp({alpha}-t^2)) weight"),
        }
    }

    pub fn gaussian() -> Self {
        Self {
            cutoff: 40f64.sqrt(),
            decay_note: "exp(-t^2) weight".to_string(),
        }
    }
}

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    splittable: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by position so the order is deterministic.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    let splittable = (b - a).abs() > 1e3 * f64::EPSILON * center.abs().max(f64::MIN_POSITIVE);
    Panel {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
        splittable,
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], spec)
}

/// Integrate `f` over `[points[0], points[last]]`, starting the adaptive
/// refinement from the panels delimited by `points` (which must be increasing).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::InvalidConfig(
            "integration needs at least two break points".into(),
        ));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(format!(
            "break points must be finite and strictly increasing, got [{}, .., {}]",
            points[0],
            points[points.len() - 1]
        )));
    }

    let mut heap = BinaryHeap::with_capacity(points.len() + 64);
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in points.windows(2) {
        let p = gauss_kronrod(&f, w[0], w[1]);
        total += p.value;
        total_err += p.error;
        total_abs += p.abs_value;
        heap.push(p);
    }
    // Below this the estimate is f64 noise of the summed panels (matters when
    // the integral cancels to ~0).
    let noise = |abs: f64| 100.0 * f64::EPSILON * abs;

    let mut splits = 0usize;
    let mut finished: Vec<Panel> = Vec::new();
    loop {
        if total_err <= spec.tolerance(total).max(noise(total_abs)) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if !worst.splittable {
            // Round-off limited: its error cannot be reduced further.
            finished.push(worst);
            continue;
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                a: points[0],
                b: points[points.len() - 1],
                estimate: total_err,
                tolerance: spec.tolerance(total),
            });
        }
        splits += 1;
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }

    finished.extend(heap);
    let err_sum: f64 = finished.iter().map(|p| p.error).sum();
    finished.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = finished.iter().map(|p| p.value).sum();
    if !value.is_finite() {
        return Err(Error::NonConvergence {
            a: points[0],
            b: points[points.len() - 1],
            estimate: f64::INFINITY,
            tolerance: spec.tolerance(0.0),
        });
    }
    // Panels that could not be split only carry round-off; accept them when the
    // remaining error is at the level of f64 noise for the result.
    if err_sum > spec.tolerance(value).max(noise(total_abs))
        && err_sum > 1e3 * f64::EPSILON * value.abs().max(1.0)
    {
        return Err(Error::NonConvergence {
            a: points[0],
            b: points[points.len() - 1],
            estimate: err_sum,
            tolerance: spec.tolerance(value),
        });
    }
    Ok(value)
}

/// Integrate over the finite stand-in of a semi-infinite domain, `[0, cutoff]`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    domain: &SemiInfiniteDomain,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate(f, 0.0, domain.cutoff, spec)
}

/// Cauchy principal value of `∫_a^b g(t)/(t - tau) dt` by singularity subtraction:
/// `∫ (g(t) - g(tau))/(t - tau) dt + g(tau) ln((b - tau)/(tau - a))`.
///
/// The log term vanishes when the interval is symmetric about `tau`.
pub fn principal_value<G: Fn(f64) -> f64>(
    g: G,
    a: f64,
    b: f64,
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    principal_value_with_breaks(g, &[a, b], tau, spec)
}

/// As [`principal_value`] over `[points[0], points[last]]`, starting the
/// adaptive refinement from the given break points as well as `tau`.
pub fn principal_value_with_breaks<G: Fn(f64) -> f64>(
    g: G,
    points: &[f64],
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (a, b) = match points {
        [first, .., last] => (*first, *last),
        _ => return Err(Error::InvalidConfig("principal value needs an interval".into())),
    };
    if !(a < tau && tau < b) {
        return Err(Error::PoleOutsideDomain { tau, a, b });
    }
    let mut pts = points.to_vec();
    pts.push(tau);
    let pts = merge_breaks(a, b, &pts);
    let g_tau = g(tau);
    let regular = integrate_with_breaks(|t| (g(t) - g_tau) / (t - tau), &pts, spec)?;
    Ok(regular + g_tau * ((b - tau) / (tau - a)).ln())
}

/// Largest panel width allowed for `cos(k x)` at coordinate `x`.
pub fn oscillation_panel(x: f64) -> f64 {
    PI / (4.0 * x.abs().max(1.0))
}

/// Break points on `[a, b]` no wider than `max_width` (at least one panel).
pub fn uniform_breaks(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let n = (((b - a) / max_width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut pts: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    pts.push(b);
    pts
}

/// Merge extra break points into a sorted, deduplicated list clipped to `[a, b]`.
pub fn merge_breaks(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|p| *p > a && *p < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1.0));
    pts
}

/// `(1/π) ∫_0^{k_max} cos(k x) f(k) dk` with panels capped at `π/(4 max(x, 1))`.
pub fn cosine_transform<F: Fn(f64) -> f64>(
    f: F,
    k_max: f64,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    cosine_transform_with_breaks(f, k_max, x, &[], spec)
}

/// As [`cosine_transform`], additionally splitting at `extra_breaks`.
pub fn cosine_transform_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    k_max: f64,
    x: f64,
    extra_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "cosine transform needs x >= 0, got {x}"
        )));
    }
    let mut pts = uniform_breaks(0.0, k_max, oscillation_panel(x));
    pts.extend_from_slice(extra_breaks);
    let pts = merge_breaks(0.0, k_max, &pts);
    let spec = QuadratureSpec {
        max_subdivisions: spec.max_subdivisions + pts.len(),
        ..*spec
    };
    Ok(integrate_with_breaks(|k| (k * x).cos() * f(k), &pts, &spec)? / PI)
}

/// Which trigonometric factor multiplies the tail integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// `∫_{k0}^∞ trig(k x) g(k) dk` for a smooth, non-oscillating `g` decaying at
/// least like `ln k / k^2`.
///
/// For `x = 0` the integral is mapped onto `(0, 1]` by `k = k0/s`. For `x > 0`
/// it is integrated numerically up to `k1 = max(k0, 100/x)` and closed with the
/// three-term integration-by-parts expansion.
pub fn fourier_tail<G: Fn(f64) -> f64>(
    g: G,
    k0: f64,
    x: f64,
    trig: Trig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if x == 0.0 {
        return match trig {
            Trig::Sin => Ok(0.0),
            Trig::Cos => integrate(
                |s| {
                    if s <= 0.0 {
                        0.0
                    } else {
                        g(k0 / s) * k0 / (s * s)
                    }
                },
                0.0,
                1.0,
                spec,
            ),
        };
    }
    let k1 = k0.max(100.0 / x);
    let trig_fn = |v: f64| match trig {
        Trig::Cos => v.cos(),
        Trig::Sin => v.sin(),
    };
    let mut body = 0.0;
    if k1 > k0 {
        let mut geo = Vec::new();
        let mut p = k0;
        while p < k1 {
            geo.push(p);
            p *= 2.0;
        }
        let mut pts = uniform_breaks(k0, k1, oscillation_panel(x));
        pts.extend(geo);
        let pts = merge_breaks(k0, k1, &pts);
        let spec = QuadratureSpec {
            max_subdivisions: spec.max_subdivisions + pts.len(),
            ..*spec
        };
        body = integrate_with_breaks(|k| trig_fn(k * x) * g(k), &pts, &spec)?;
    }
    let h = 1e-2 * k1;
    let (gm, g1, gp) = (g(k1 - h), g(k1), g(k1 + h));
    let dg1 = (gp - gm) / (2.0 * h);
    let d2g1 = (gp - 2.0 * g1 + gm) / (h * h);
    let (s, c) = (k1 * x).sin_cos();
    let (x2, x3) = (x * x, x * x * x);
    let asymptotic = match trig {
        Trig::Cos => -g1 * s / x - dg1 * c / x2 + d2g1 * s / x3,
        Trig::Sin => g1 * c / x - dg1 * s / x2 - d2g1 * c / x3,
    };
    Ok(body + asymptotic)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
