//! `kramers`: slip coefficients, Knudsen-layer profiles and exact references
//! for a Fermi gas over a specular-diffuse wall.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fermi_kramers::dimensional::GasParameters;
use fermi_kramers::moments::GridConfig;
use fermi_kramers::neumann::DEFAULT_ORDER;
use fermi_kramers::SolverConfig;

use crate::error::CliError;
use crate::output::{emit, render, Format, Report};

/// Environment variable that overrides the number of k-grid nodes.
const GRID_ENV: &str = "KRAMERS_GRID_NODES";

#[derive(Parser)]
#[command(name = "kramers", version, about = "Isothermal slip of a Fermi gas (Kramers problem)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of k-grid nodes (overrides KRAMERS_GRID_NODES).
    #[arg(long)]
    grid_nodes: Option<usize>,
    /// Upper end of the k-grid.
    #[arg(long)]
    k_max: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Slip coefficient C(q, alpha) with its partial sums.
    Slip {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        /// Also evaluate the exact diffuse-wall slip (q = 1 only).
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Series coefficients U_n and spectral densities E_n(k) on the grid.
    Series {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Velocity profile U(x) in the Knudsen layer.
    Profile {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = 25.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.125)]
        dx: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Slip coefficient over a range of alpha.
    ScanAlpha {
        #[arg(long, allow_hyphen_values = true, default_value_t = -10.0)]
        alpha_from: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
        alpha_to: f64,
        #[arg(long, default_value_t = 28)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Slip coefficient over a range of q at fixed alpha.
    ScanQ {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        q_from: f64,
        #[arg(long, default_value_t = 1.0)]
        q_to: f64,
        #[arg(long, default_value_t = 18)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact diffuse-wall slip V1 and wall velocity.
    Exact {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Viscosity, mean free path and slip velocity in SI units.
    Dimensional {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        /// Particle mass, kg.
        #[arg(long)]
        mass: f64,
        /// Temperature, K.
        #[arg(long)]
        temperature: f64,
        /// Collision frequency, 1/s.
        #[arg(long)]
        collision_frequency: f64,
        /// Number density, 1/m^3 (derived from --spin when absent).
        #[arg(long)]
        number_density: Option<f64>,
        /// Particle spin.
        #[arg(long)]
        spin: Option<f64>,
        /// Far-field velocity gradient, 1/s.
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        gradient: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Far-field gradient G_v that produces a given slip velocity.
    Inverse {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        /// Prescribed slip velocity (units of G_v times the mean free path).
        #[arg(long, allow_hyphen_values = true)]
        u_sl: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn solver_config(common: &Common) -> Result<SolverConfig, CliError> {
    let mut grid = GridConfig::default();
    let env_nodes = match std::env::var(GRID_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            CliError::Validation(format!("{GRID_ENV} must be a positive integer, got {v:?}"))
        })?),
        Err(_) => None,
    };
    if let Some(n) = common.grid_nodes.or(env_nodes) {
        if n < 16 {
            return Err(CliError::Validation(format!("grid needs at least 16 nodes, got {n}")));
        }
        grid = GridConfig::with_nodes(n);
    }
    if let Some(k) = common.k_max {
        grid.k_max = k;
    }
    grid.validate()?;
    Ok(SolverConfig {
        grid,
        ..SolverConfig::default()
    })
}

fn finish<R: Report>(report: R, common: &Common) -> Result<(), CliError> {
    let text = render(&report, common.format)?;
    emit(&text, common.output.as_deref())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Slip { alpha, q, order, exact, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::slip(alpha, q, order, exact, &cfg)?, &common)?;
        }
        Command::Series { alpha, order, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::series(alpha, order, &cfg)?, &common)?;
        }
        Command::Profile { alpha, q, order, x_max, dx, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::profile(alpha, q, order, x_max, dx, &cfg)?, &common)?;
        }
        Command::ScanAlpha { alpha_from, alpha_to, steps, q, order, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::scan_alpha(alpha_from, alpha_to, steps, q, order, &cfg)?, &common)?;
        }
        Command::ScanQ { alpha, q_from, q_to, steps, order, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::scan_q(alpha, q_from, q_to, steps, order, &cfg)?, &common)?;
        }
        Command::Exact { alpha, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::exact(alpha, &cfg)?, &common)?;
        }
        Command::Dimensional {
            alpha,
            q,
            order,
            mass,
            temperature,
            collision_frequency,
            number_density,
            spin,
            gradient,
            common,
        } => {
            let cfg = solver_config(&common)?;
            let params = GasParameters {
                mass,
                temperature,
                collision_frequency,
                number_density,
                spin,
                gradient,
            };
            finish(commands::dimensional(&params, alpha, q, order, &cfg)?, &common)?;
        }
        Command::Inverse { alpha, q, order, u_sl, common } => {
            let cfg = solver_config(&common)?;
            finish(commands::inverse(alpha, q, order, u_sl, &cfg)?, &common)?;
        }
        Command::Selftest { common } => {
            let cfg = solver_config(&common)?;
            let report = commands::selftest(&cfg)?;
            let passed = report.passed;
            finish(report, &common)?;
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("selftest: some checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("kramers: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
