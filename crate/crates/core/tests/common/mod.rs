//! Independent reference values shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `Σ_{m≥1} (-1)^{m+1} x^m / m^p` for `0 < x ≤ 1`, summed with the
/// Cohen–Villegas–Zagier acceleration.
pub fn alternating_polylog(x: f64, p: f64) -> f64 {
    let n = 40;
    let mut d = (3.0 + 8f64.sqrt()).powi(n);
    d = (d + 1.0 / d) / 2.0;
    let (mut b, mut c, mut s) = (-1.0, -d, 0.0);
    for k in 0..n {
        c = b - c;
        let m = (k + 1) as f64;
        s += c * x.powf(m) / m.powf(p);
        let (kf, nf) = (k as f64, n as f64);
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// `∫_{-∞}^{∞} t^n ln(1+e^{α-t²}) dt / 2` by the trapezoid rule, which is
/// spectrally accurate for this analytic, rapidly decaying integrand.
fn trapezoid_even(n: i32, alpha: f64) -> f64 {
    let h = 0.005;
    let top = (alpha.max(0.0) + 45.0).sqrt();
    let m = (top / h) as i64;
    let s: f64 = (-m..=m).map(|j| {
        let t = j as f64 * h;
        t.abs().powi(n) * log1p_exp(alpha - t * t)
    }).sum();
    0.5 * h * s
}

/// `l_n(α) = ∫_0^∞ t^n ln(1+e^{α-t²}) dt`, `n ∈ {0, 1, 2}`.
pub fn l_oracle(n: usize, alpha: f64) -> f64 {
    match (n, alpha <= 0.0) {
        (0, true) => PI.sqrt() / 2.0 * alternating_polylog(alpha.exp(), 1.5),
        (1, true) => 0.5 * alternating_polylog(alpha.exp(), 2.0),
        (2, true) => PI.sqrt() / 4.0 * alternating_polylog(alpha.exp(), 2.5),
        // Li_2 inversion: -Li_2(-e^α) = π²/6 + α²/2 + Li_2(-e^{-α})
        (1, false) => 0.5 * (PI * PI / 6.0 + alpha * alpha / 2.0 - alternating_polylog((-alpha).exp(), 2.0)),
        (0, false) => trapezoid_even(0, alpha),
        (2, false) => trapezoid_even(2, alpha),
        _ => panic!("no oracle for n = {n}"),
    }
}
