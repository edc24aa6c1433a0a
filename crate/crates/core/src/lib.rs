//! Squeezed-photon Jaynes-Cummings model.
//!
//! - [`fock`]: truncated oscillator and qubit operators, Hermitian
//!   eigensolver, matrix exponential of anti-Hermitian generators.
//! - [`models`]: Hamiltonian builders (squeezed, Jaynes-Cummings, Rabi,
//!   displaced, generic Rabi, quadratic) and the decoupling rotation.
//! - [`analytic`]: effective quadratic coefficients, Bogoliubov solution,
//!   critical couplings and phase-resolved gaps.
//! - [`ed`]: exact diagonalization with cutoff convergence and gap scans.
//! - [`sweep`]: parallel phase-diagram sweeps and CSV output.
//! - [`validate`]: self-check suites.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod ed;
pub mod error;
pub mod fock;
pub mod models;
pub mod sweep;
pub mod validate;

pub use error::{ConfigError, Error, Result};
pub use fock::{Basis, FockSpace, OperatorMatrix};
pub use models::{ModelParams, RabiParams};
