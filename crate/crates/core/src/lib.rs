//! Modified Patankar-Runge-Kutta MPRK22(α) schemes for positive and
//! conservative production-destruction systems.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! * [`pds`]: production-destruction systems, general and linear,
//! * [`scheme`]: one MPRK22(α) step for every sign regime of α and
//!   trajectory integration,
//! * [`stability`]: stability functions, critical step arguments and the
//!   Jacobian of the step map at a steady state,
//! * [`experiments`]: the two-species test problem, the distance to the
//!   steady state after many steps, grid scans and convergence studies.
//!
//! File formats, the command line and parallel scan execution live in the
//! `mprk-cli` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod experiments;
pub mod matrix;
pub mod params;
pub mod pds;
pub mod scheme;
pub mod stability;

pub use error::{Error, Result};
pub use matrix::{solve_dense, solve_unit_column_sum_in_place, DenseMatrix};
pub use params::{MprkParams, Regime};
pub use pds::{LinearPds, ProductionDestruction, State, TwoSpeciesSystem};
pub use scheme::{integrate, mprk22_step, StepWorkspace, Trajectory};
