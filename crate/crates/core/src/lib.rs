//! Isothermal slip of a quantum Fermi gas over a flat wall with
//! specular–diffuse reflection (the Kramers problem for the log-Fermi BGK
//! kernel).
//!
//! The solver expands the slip velocity, the spectral density of the
//! Knudsen-layer velocity and the distribution function in powers of the
//! diffuseness `q` and computes the coefficients by successive
//! approximation. An independent phase-integral evaluation of the exact
//! diffuse-wall slip is provided for validation.
//!
//! Modules, bottom-up:
//! - [`quadrature`]: adaptive Gauss–Kronrod, principal values, cosine transforms
//! - [`kernel`]: `K_F(μ, α)` and the log-Fermi moments
//! - [`moments`]: `T_n(k)`, `L(k)`, `J`, `J_n`, `S` and the k-grid
//! - [`neumann`]: coefficients `U_n`, densities `E_n`, slip `C(q, α)`
//! - [`profile`]: velocity profile, wall velocity, distribution function
//! - [`exact`]: exact diffuse slip and wall velocity
//! - [`dimensional`]: viscosity, mean free path, slip coefficient in SI units
//! - [`selftest`]: quick invariant checks

pub mod dimensional;
pub mod error;
pub mod exact;
pub mod interp;
pub mod kernel;
pub mod moments;
pub mod neumann;
pub mod profile;
pub mod quadrature;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::KernelContext;
pub use neumann::{build_series, NeumannSeries, SlipSolution, SolverConfig};
