//! Lifespan experiments for cyclic semilinear heat systems
//! `∂_t u_j - Δu_j = |u_{j+1}|^{p_j}`, `j = 1..k` cyclically.
//!
//! * [`exponents`]: exact critical exponent algebra.
//! * [`chain`]: the constant chain of the ODE minorant and the lifespan upper bound.
//! * [`ode`]: adaptive integration of the reduced ODE systems with blow-up detection.
//! * [`test_function`]: the eigenfunction weight and the functionals it defines.
//! * [`pde`]: the radial IMEX solver.
//! * [`campaign`], [`config`], [`output`]: sweeps, configuration and file output.

pub mod campaign;
pub mod chain;
pub mod config;
pub mod error;
pub mod exponents;
pub mod mesh;
pub mod ode;
pub mod output;
pub mod pde;
pub mod test_function;

pub use error::{Error, Result};
