use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fermi_kramers::dimensional::{dimensional_slip_from, slip_coefficient_from, DimensionalResult, GasParameters};
use fermi_kramers::exact::{exact_slip_with, exact_wall_velocity};
use fermi_kramers::profile::{full_profile, wall_velocity_partials};
use fermi_kramers::selftest::run_checks;
use fermi_kramers::{build_series, KernelContext, SolverConfig};

use crate::error::CliError;
use crate::output::{sig9, sig9_all, Report, Table};

/// Highest series order the CLI accepts.
pub const MAX_ORDER: usize = 12;

fn check_order(order: usize) -> Result<(), CliError> {
    if order > MAX_ORDER {
        return Err(CliError::Validation(format!("order must be at most {MAX_ORDER}, got {order}")));
    }
    Ok(())
}

fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Validation("a scan needs finite ends and at least one step".into()));
    }
    Ok((0..=steps).map(|i| from + (to - from) * i as f64 / steps as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPart {
    #[serde(rename = "V1")]
    pub v1: f64,
    pub relative_errors_percent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlipReport {
    pub alpha: f64,
    pub q: f64,
    pub order: usize,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub partials: Vec<f64>,
    #[serde(rename = "Kv")]
    pub k_v: f64,
    pub exact: Option<ExactPart>,
}

impl Report for SlipReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["n", "U_n", "C_partial"]);
        for (n, (u, p)) in self.u.iter().zip(&self.partials).enumerate() {
            t.push_numbers(&[n as f64, *u, *p]);
        }
        t
    }
}

pub fn slip(alpha: f64, q: f64, order: usize, with_exact: bool, cfg: &SolverConfig) -> Result<SlipReport, CliError> {
    check_order(order)?;
    if with_exact && q != 1.0 {
        return Err(CliError::Validation("the exact reference exists only for q = 1".into()));
    }
    let series = build_series(alpha, order, cfg)?;
    let mut sol = series.slip(q)?;
    let exact = if with_exact {
        let v1 = exact_slip_with(series.ctx())?;
        sol.exact_reference = Some(v1);
        Some(ExactPart {
            v1: sig9(v1),
            relative_errors_percent: sig9_all(&sol.relative_errors().unwrap_or_default()),
        })
    } else {
        None
    };
    Ok(SlipReport {
        alpha,
        q,
        order,
        u: sig9_all(&sol.coefficients),
        c: sig9(sol.c),
        partials: sig9_all(&sol.partials),
        k_v: sig9(slip_coefficient_from(&series, q)?),
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub alpha: f64,
    pub order: usize,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
    pub k: Vec<f64>,
    /// `E[n][i] = E_n(k_i)`.
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
}

impl Report for SeriesReport {
    fn table(&self) -> Table {
        let mut header = vec!["k".to_string()];
        header.extend((0..self.e.len()).map(|n| format!("E{n}")));
        let mut t = Table::new(header);
        for (i, k) in self.k.iter().enumerate() {
            let mut row = vec![*k];
            row.extend(self.e.iter().map(|e| e[i]));
            t.push_numbers(&row);
        }
        t
    }
}

pub fn series(alpha: f64, order: usize, cfg: &SolverConfig) -> Result<SeriesReport, CliError> {
    check_order(order)?;
    let s = build_series(alpha, order, cfg)?;
    let mut k = vec![0.0];
    k.extend_from_slice(&s.grid().nodes);
    let e = s
        .densities
        .iter()
        .map(|d| {
            let mut v = vec![d.at_zero()];
            v.extend_from_slice(d.on_grid());
            sig9_all(&v)
        })
        .collect();
    Ok(SeriesReport {
        alpha,
        order,
        u: sig9_all(&s.u),
        k: sig9_all(&k),
        e,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub alpha: f64,
    pub q: f64,
    pub order: usize,
    pub wall_velocity: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(rename = "Uc")]
    pub uc: Vec<Vec<f64>>,
    #[serde(rename = "U_total")]
    pub total: Vec<f64>,
    #[serde(rename = "U_asymptote")]
    pub asymptote: Vec<f64>,
}

impl Report for ProfileReport {
    fn table(&self) -> Table {
        let mut header = vec!["x".to_string()];
        header.extend((0..self.uc.len()).map(|n| format!("Uc{n}")));
        header.push("U_total".into());
        header.push("U_asymptote".into());
        let mut t = Table::new(header);
        for i in 0..self.x.len() {
            let mut row = vec![self.x[i]];
            row.extend(self.uc.iter().map(|u| u[i]));
            row.push(self.total[i]);
            row.push(self.asymptote[i]);
            t.push_numbers(&row);
        }
        t
    }
}

pub fn profile(
    alpha: f64,
    q: f64,
    order: usize,
    x_max: f64,
    dx: f64,
    cfg: &SolverConfig,
) -> Result<ProfileReport, CliError> {
    check_order(order)?;
    if !(dx > 0.0 && x_max >= 0.0 && x_max.is_finite()) || x_max / dx > 1e5 {
        return Err(CliError::Validation(format!("bad profile grid: x_max = {x_max}, dx = {dx}")));
    }
    let n = (x_max / dx + 1e-9).floor() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();
    let s = build_series(alpha, order, cfg)?;
    let p = full_profile(&s, q, &xs)?;
    Ok(ProfileReport {
        alpha,
        q,
        order,
        wall_velocity: sig9_all(&wall_velocity_partials(&s, q, order)?),
        x: sig9_all(&p.x),
        uc: p.uc_by_order.iter().map(|u| sig9_all(u)).collect(),
        total: sig9_all(&p.total),
        asymptote: sig9_all(&p.asymptote),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub alpha: f64,
    #[serde(rename = "Kv")]
    pub k_v: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaScan {
    pub q: f64,
    pub order: usize,
    pub rows: Vec<AlphaRow>,
}

impl Report for AlphaScan {
    fn table(&self) -> Table {
        let mut header = vec!["alpha".to_string(), "Kv".into(), "C".into()];
        header.extend((0..=self.order).map(|n| format!("U{n}")));
        let mut t = Table::new(header);
        for r in &self.rows {
            let mut row = vec![r.alpha, r.k_v, r.c];
            row.extend_from_slice(&r.u);
            t.push_numbers(&row);
        }
        t
    }
}

pub fn scan_alpha(
    from: f64,
    to: f64,
    steps: usize,
    q: f64,
    order: usize,
    cfg: &SolverConfig,
) -> Result<AlphaScan, CliError> {
    check_order(order)?;
    let alphas = linspace(from, to, steps)?;
    // one moment cache per α; rayon keeps the input order
    let rows = alphas
        .par_iter()
        .map(|&alpha| -> Result<AlphaRow, CliError> {
            let s = build_series(alpha, order, cfg)?;
            Ok(AlphaRow {
                alpha: sig9(alpha),
                k_v: sig9(slip_coefficient_from(&s, q)?),
                c: sig9(s.series_factor(q)?),
                u: sig9_all(&s.u),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AlphaScan { q, order, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QRow {
    pub q: f64,
    #[serde(rename = "Kv")]
    pub k_v: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QScan {
    pub alpha: f64,
    pub order: usize,
    pub rows: Vec<QRow>,
}

impl Report for QScan {
    fn table(&self) -> Table {
        let mut t = Table::new(["q", "Kv", "C"]);
        for r in &self.rows {
            t.push_numbers(&[r.q, r.k_v, r.c]);
        }
        t
    }
}

pub fn scan_q(alpha: f64, from: f64, to: f64, steps: usize, order: usize, cfg: &SolverConfig) -> Result<QScan, CliError> {
    check_order(order)?;
    let qs = linspace(from, to, steps)?;
    let s = build_series(alpha, order, cfg)?;
    let rows = qs
        .iter()
        .map(|&q| {
            Ok(QRow {
                q: sig9(q),
                k_v: sig9(slip_coefficient_from(&s, q)?),
                c: sig9(s.series_factor(q)?),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(QScan { alpha, order, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    #[serde(rename = "V1")]
    pub v1: f64,
    pub wall_exact: f64,
}

impl Report for ExactReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["V1", "wall_exact"]);
        t.push_numbers(&[self.v1, self.wall_exact]);
        t
    }
}

pub fn exact(alpha: f64, cfg: &SolverConfig) -> Result<ExactReport, CliError> {
    let ctx = KernelContext::with_spec(alpha, cfg.quad)?;
    Ok(ExactReport {
        v1: sig9(exact_slip_with(&ctx)?),
        wall_exact: sig9(exact_wall_velocity(alpha)?),
    })
}

impl Report for DimensionalResult {
    fn table(&self) -> Table {
        let mut t = Table::new(["eta_Pa_s", "mfp_m", "Kv", "u_sl_m_per_s"]);
        t.push_numbers(&[self.viscosity, self.mean_free_path, self.k_v, self.u_sl]);
        t
    }
}

pub fn dimensional(
    params: &GasParameters,
    alpha: f64,
    q: f64,
    order: usize,
    cfg: &SolverConfig,
) -> Result<DimensionalResult, CliError> {
    check_order(order)?;
    params.validate()?;
    let s = build_series(alpha, order, cfg)?;
    let r = dimensional_slip_from(params, &s, q)?;
    Ok(DimensionalResult {
        viscosity: sig9(r.viscosity),
        mean_free_path: sig9(r.mean_free_path),
        k_v: sig9(r.k_v),
        u_sl: sig9(r.u_sl),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseReport {
    pub alpha: f64,
    pub q: f64,
    pub order: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub u_sl: f64,
    #[serde(rename = "G_v")]
    pub g_v: f64,
}

impl Report for InverseReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["alpha", "q", "C", "u_sl", "G_v"]);
        t.push_numbers(&[self.alpha, self.q, self.c, self.u_sl, self.g_v]);
        t
    }
}

pub fn inverse(alpha: f64, q: f64, order: usize, u_sl: f64, cfg: &SolverConfig) -> Result<InverseReport, CliError> {
    check_order(order)?;
    if !u_sl.is_finite() {
        return Err(CliError::Validation(format!("slip velocity must be finite, got {u_sl}")));
    }
    let sol = build_series(alpha, order, cfg)?.slip(q)?;
    Ok(InverseReport {
        alpha,
        q,
        order,
        c: sig9(sol.c),
        u_sl,
        g_v: sig9(sol.invert(u_sl)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<CheckRow>,
}

impl Report for SelftestReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["check", "passed", "detail"]);
        for c in &self.checks {
            t.rows.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
        }
        t
    }
}

pub fn selftest(cfg: &SolverConfig) -> Result<SelftestReport, CliError> {
    let checks: Vec<CheckRow> = run_checks(cfg)?
        .into_iter()
        .map(|c| CheckRow {
            name: c.name,
            passed: c.passed,
            detail: c.detail,
        })
        .collect();
    Ok(SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::{render, Format};
    use fermi_kramers::moments::GridConfig;
    use serde::de::DeserializeOwned;

    fn small() -> SolverConfig {
        SolverConfig {
            grid: GridConfig::with_nodes(96),
            ..SolverConfig::default()
        }
    }

    fn round_trip<R: Report + DeserializeOwned + PartialEq + std::fmt::Debug>(r: R) {
        let text = render(&r, Format::Json).unwrap();
        let back: R = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let csv = render(&r, Format::Csv).unwrap();
        let t = r.table();
        assert_eq!(csv.lines().count(), t.rows.len() + 1);
        assert!(t.rows.iter().all(|row| row.len() == t.header.len()));
    }

    #[test]
    fn every_report_round_trips() {
        let cfg = small();
        round_trip(slip(-30.0, 1.0, 2, true, &cfg).unwrap());
        round_trip(series(-5.0, 1, &cfg).unwrap());
        round_trip(profile(-30.0, 0.8, 1, 2.0, 0.5, &cfg).unwrap());
        round_trip(scan_alpha(-4.0, 0.0, 2, 1.0, 3, &cfg).unwrap());
        round_trip(scan_q(-5.0, 0.2, 1.0, 4, 2, &cfg).unwrap());
        round_trip(exact(-30.0, &cfg).unwrap());
        let gas = GasParameters {
            mass: 6.64e-27,
            temperature: 300.0,
            collision_frequency: 1e9,
            number_density: Some(2.5e25),
            spin: None,
            gradient: 1.0,
        };
        round_trip(dimensional(&gas, -30.0, 1.0, 2, &cfg).unwrap());
        round_trip(inverse(-30.0, 0.5, 2, 0.25, &cfg).unwrap());
    }

    #[test]
    fn schemas() {
        let cfg = small();
        let scan = scan_alpha(-2.0, 0.0, 1, 1.0, 3, &cfg).unwrap();
        assert_eq!(scan.table().header.join(","), "alpha,Kv,C,U0,U1,U2,U3");
        let p = profile(-30.0, 1.0, 2, 1.0, 0.5, &cfg).unwrap();
        assert_eq!(p.table().header.join(","), "x,Uc0,Uc1,Uc2,U_total,U_asymptote");
        let d = dimensional(
            &GasParameters {
                mass: 1e-26,
                temperature: 10.0,
                collision_frequency: 1e8,
                number_density: None,
                spin: Some(0.5),
                gradient: 2.0,
            },
            0.0,
            1.0,
            1,
            &cfg,
        )
        .unwrap();
        let json = render(&d, Format::Json).unwrap();
        for key in ["eta_Pa_s", "mfp_m", "Kv", "u_sl_m_per_s"] {
            assert!(json.contains(&format!("\"{key}\"")), "{key} missing");
        }
    }

    #[test]
    fn validation_errors() {
        let cfg = small();
        assert!(matches!(slip(-30.0, 0.5, 2, true, &cfg), Err(CliError::Validation(_))));
        assert!(matches!(slip(-30.0, 1.0, 99, false, &cfg), Err(CliError::Validation(_))));
        assert!(matches!(scan_q(-5.0, 0.1, 1.0, 0, 3, &cfg), Err(CliError::Validation(_))));
        assert!(matches!(inverse(-30.0, 1.5, 1, 1.0, &cfg), Err(CliError::Validation(_))));
    }
}
