//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::l_oracle;
use fermi_kramers::dimensional::slip_coefficient_from;
use fermi_kramers::exact::{exact_slip_diffuse, exact_wall_velocity};
use fermi_kramers::kernel::{degenerate_kernel, log_fermi_moment, maxwell_kernel};
use fermi_kramers::moments::{coupling_j, kernel_s, moment_t, MomentCache, KGrid};
use fermi_kramers::profile::{density_moment, total_correction, wall_velocity_partials};
use fermi_kramers::quadrature::integrate_with_breaks;
use fermi_kramers::{build_series, KernelContext, NeumannSeries, SolverConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const U_REF: [f64; 4] = [0.886227, 0.140523, -0.011555, 0.0010925];
const PARTIAL_REF: [f64; 4] = [0.886227, 1.02675, 1.015195, 1.016288];
const PARTIAL_ERR_REF: [f64; 4] = [12.8, 1.04, 0.098, 0.009];
const WALL_REF: [f64; 3] = [0.6747, 0.7103, 0.7068];
const WALL_ERR_REF: [f64; 3] = [4.6, -0.45, 0.044];

type Outcome = Result<String, String>;

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol && got.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} = {got:.7} vs {want} (tolerance {tol:e})"))
    }
}

struct Reference {
    series: NeumannSeries,
    elapsed: f64,
    exact: f64,
}

fn reference(config: &SolverConfig) -> Result<Reference, String> {
    let start = Instant::now();
    let series = build_series(-30.0, 3, config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let exact = exact_slip_diffuse(-30.0).map_err(|e| e.to_string())?;
    Ok(Reference { series, elapsed, exact })
}

fn coefficients(r: &Reference) -> Outcome {
    for (n, (u, want)) in r.series.u.iter().zip(U_REF).enumerate() {
        within(&format!("U_{n}"), *u, want, 5e-4)?;
    }
    if r.elapsed > 30.0 {
        return Err(format!("series took {:.1} s", r.elapsed));
    }
    Ok(format!("U = {:?}, built in {:.2} s", r.series.u, r.elapsed))
}

fn partials(r: &Reference) -> Outcome {
    let p = r.series.partial_sums(1.0).map_err(|e| e.to_string())?;
    for (n, (got, want)) in p.iter().zip(PARTIAL_REF).enumerate() {
        within(&format!("partial {n}"), *got, want, 1e-3)?;
    }
    let errs: Vec<f64> = p.iter().map(|c| (r.exact - c) / r.exact * 100.0).collect();
    for (n, (e, want)) in errs.iter().zip(PARTIAL_ERR_REF).enumerate() {
        within(&format!("|error {n}| (%)"), e.abs(), want, 0.15)?;
        if n > 0 && e.signum() == errs[n - 1].signum() {
            return Err(format!("errors {errs:?} do not alternate in sign"));
        }
    }
    Ok(format!("errors (%) = {errs:.4?}"))
}

fn exact_slip(r: &Reference) -> Outcome {
    within("V1", r.exact, 1.0162, 5e-4)?;
    let last = *r.series.partial_sums(1.0).map_err(|e| e.to_string())?.last().unwrap();
    within("third-order slip", last, r.exact, 2e-3)?;
    Ok(format!("V1 = {:.7}, third order {last:.7}", r.exact))
}

fn wall(r: &Reference) -> Outcome {
    let p = wall_velocity_partials(&r.series, 1.0, 2).map_err(|e| e.to_string())?;
    for (n, (got, want)) in p.iter().zip(WALL_REF).enumerate() {
        within(&format!("wall partial {n}"), *got, want, 2e-3)?;
    }
    let exact = exact_wall_velocity(-30.0).map_err(|e| e.to_string())?;
    within("exact wall", exact, 0.70711, 1e-5)?;
    let errs: Vec<f64> = p.iter().map(|w| (exact - w) / exact * 100.0).collect();
    for (n, (e, want)) in errs.iter().zip(WALL_ERR_REF).enumerate() {
        within(&format!("wall error {n} (%)"), *e, want, 0.1)?;
    }
    Ok(format!("wall partials {p:.5?}, errors (%) {errs:.3?}"))
}

fn kernel_identities() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    for alpha in [-30.0, -5.0, 0.0, 2.0, 10.0] {
        let ctx = KernelContext::new(alpha).map_err(|e| e.to_string())?;
        let half = integrate_with_breaks(|t| ctx.kernel(t), &ctx.t_breaks(&[]), ctx.spec())
            .map_err(|e| e.to_string())?;
        worst_norm = worst_norm.max((2.0 * half - 1.0).abs());
    }
    if worst_norm > 1e-10 {
        return Err(format!("normalization off by {worst_norm:e}"));
    }

    let ctx = KernelContext::new(-5.0).map_err(|e| e.to_string())?;
    let cache = MomentCache::new(ctx.clone(), KGrid::new(Default::default()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let dispersion = cache.dispersion_residual();
    if dispersion > 1e-9 {
        return Err(format!("dispersion residual {dispersion:e}"));
    }

    let t10 = moment_t(1, 0.0, &ctx).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(20);
    let (mut worst_id, mut worst_sym): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let k = 10f64.powf(rng.gen_range(-2.0..1.5));
        let k1 = 10f64.powf(rng.gen_range(-2.0..1.5));
        let run = || -> fermi_kramers::Result<(f64, f64)> {
            let j = coupling_j(k, k1, &ctx)?;
            let lhs = j - moment_t(1, k, &ctx)? * moment_t(1, k1, &ctx)? / t10;
            let s = kernel_s(k, k1, &ctx)?;
            let s_swap = kernel_s(k1, k, &ctx)?;
            let id = (lhs - k * k * s).abs() / (k * k * s).abs().max(1.0);
            let sym = (k * k * s - k1 * k1 * s_swap).abs() / (k * k * s).abs().max(1.0);
            Ok((id, sym))
        };
        let (id, sym) = run().map_err(|e| e.to_string())?;
        worst_id = worst_id.max(id);
        worst_sym = worst_sym.max(sym);
    }
    if worst_id > 1e-9 || worst_sym > 1e-10 {
        return Err(format!("J/S identity {worst_id:e}, symmetry {worst_sym:e}"));
    }
    Ok(format!(
        "normalization {worst_norm:.1e}, dispersion {dispersion:.1e}, identity {worst_id:.1e}, symmetry {worst_sym:.1e}"
    ))
}

fn polylog_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [-3.0, 0.0, 3.0] {
        for n in 0..=2 {
            let got = log_fermi_moment(n, alpha).map_err(|e| e.to_string())?;
            let want = l_oracle(n, alpha);
            worst = worst.max(((got - want) / want).abs());
        }
    }
    if worst > 1e-9 {
        return Err(format!("relative deviation {worst:e}"));
    }
    let l1 = log_fermi_moment(1, 0.0).map_err(|e| e.to_string())?;
    within("l1(0)", l1, PI * PI / 24.0, 1e-10)?;
    Ok(format!("worst relative deviation {worst:.1e}"))
}

fn limits() -> Outcome {
    let classical = KernelContext::new(-50.0).map_err(|e| e.to_string())?;
    let mut worst_m: f64 = 0.0;
    for i in 0..=400 {
        let mu = i as f64 / 100.0;
        worst_m = worst_m.max((classical.kernel(mu) - maxwell_kernel(mu)).abs());
    }
    if worst_m > 1e-11 {
        return Err(format!("Maxwell deviation {worst_m:e}"));
    }
    let alpha: f64 = 400.0;
    let ctx = KernelContext::new(alpha).map_err(|e| e.to_string())?;
    let s = alpha.sqrt();
    let mut worst_d: f64 = 0.0;
    for i in 0..=100 {
        let mu = i as f64 / 100.0;
        let want = degenerate_kernel(mu).map_err(|e| e.to_string())?;
        worst_d = worst_d.max((s * ctx.kernel(s * mu) - want).abs() / 0.75);
    }
    if worst_d > 0.02 {
        return Err(format!("degenerate deviation {worst_d:.3}"));
    }
    Ok(format!("Maxwell {worst_m:.1e}, degenerate {:.2}%", worst_d * 100.0))
}

fn conservation(r: &Reference) -> Outcome {
    let mut detail = Vec::new();
    for x in [0.5, 2.0] {
        let lhs = density_moment(x, &r.series, 1.0, None).map_err(|e| e.to_string())?;
        let rhs = total_correction(x, &r.series, 1.0).map_err(|e| e.to_string())?;
        within(&format!("moment gap at x = {x}"), lhs - rhs, 0.0, 5e-3)?;
        detail.push(format!("x = {x}: {:.1e}", lhs - rhs));
    }
    Ok(detail.join(", "))
}

fn refinement(r: &Reference) -> Outcome {
    let fine = build_series(-30.0, 3, &r.series.config.refined()).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, String::new());
    let mut track = |name: String, a: f64, b: f64, tol: f64| {
        let rel = (a - b).abs() / tol;
        if rel > worst.0 {
            worst = (rel, name);
        }
    };
    for n in 0..4 {
        track(format!("U_{n}"), r.series.u[n], fine.u[n], 5e-4);
    }
    let (pa, pb) = (
        r.series.partial_sums(1.0).map_err(|e| e.to_string())?,
        fine.partial_sums(1.0).map_err(|e| e.to_string())?,
    );
    for n in 0..4 {
        track(format!("partial {n}"), pa[n], pb[n], 1e-3);
    }
    let (wa, wb) = (
        wall_velocity_partials(&r.series, 1.0, 2).map_err(|e| e.to_string())?,
        wall_velocity_partials(&fine, 1.0, 2).map_err(|e| e.to_string())?,
    );
    for n in 0..3 {
        track(format!("wall {n}"), wa[n], wb[n], 2e-3);
    }
    if worst.0 >= 1.0 {
        return Err(format!("{} moved by {:.2} of its tolerance", worst.1, worst.0));
    }
    Ok(format!("largest shift {:.1e} of tolerance ({})", worst.0, worst.1))
}

fn monotonicity() -> Outcome {
    let config = SolverConfig::default();
    let series = build_series(-5.0, 3, &config).map_err(|e| e.to_string())?;
    let kv: Vec<f64> = (0..=18)
        .map(|i| slip_coefficient_from(&series, 0.1 + 0.05 * i as f64))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if !kv.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("K_v(q) not strictly decreasing: {kv:?}"));
    }
    for alpha in [-10.0, -5.0, -2.0, 0.0, 2.0, 4.0] {
        let s = build_series(alpha, 3, &config).map_err(|e| e.to_string())?;
        let k = |q| slip_coefficient_from(&s, q).map_err(|e| e.to_string());
        let (a, b, c) = (k(0.5)?, k(0.7)?, k(1.0)?);
        if !(a > b && b > c) {
            return Err(format!("ordering broken at alpha = {alpha}: {a}, {b}, {c}"));
        }
    }
    Ok(format!("K_v falls from {:.4} to {:.4} over q", kv[0], kv[18]))
}

fn inverse(r: &Reference) -> Outcome {
    let mut worst: f64 = 0.0;
    for q in [0.3, 0.8, 1.0] {
        let sol = r.series.slip(q).map_err(|e| e.to_string())?;
        for g in [0.01, 1.0, 250.0] {
            let back = sol.invert(g * sol.c).map_err(|e| e.to_string())?;
            worst = worst.max((back / g - 1.0).abs());
        }
    }
    if worst > 1e-12 {
        return Err(format!("round trip off by {worst:e}"));
    }
    Ok(format!("round trip {worst:.1e}"))
}

fn main() -> ExitCode {
    let reference = reference(&SolverConfig::default());
    let needs_ref = |f: fn(&Reference) -> Outcome| -> Outcome {
        match &reference {
            Ok(r) => f(r),
            Err(e) => Err(format!("reference solve failed: {e}")),
        }
    };
    let outcomes: Vec<Outcome> = vec![
        needs_ref(coefficients),
        needs_ref(partials),
        needs_ref(exact_slip),
        needs_ref(wall),
        kernel_identities(),
        polylog_moments(),
        limits(),
        needs_ref(conservation),
        needs_ref(refinement),
        monotonicity(),
        needs_ref(inverse),
    ];
    let mut failed = 0;
    for (i, o) in outcomes.iter().enumerate() {
        match o {
            Ok(d) => println!("PASS criterion {}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
