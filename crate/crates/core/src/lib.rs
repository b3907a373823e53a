//! Mass- and energy-conserving time integration of the nonlinear Schrödinger
//! equation `i u_t + Δu + β|u|²u = 0` on periodic domains in one and two
//! dimensions.
//!
//! The equation is rewritten with the auxiliary variable `r = |u|²`, which makes
//! the energy a quadratic form. Space is discretized with the Fourier
//! pseudospectral method ([`spectral`]), the resulting system lives in [`ieq`],
//! and time is advanced by diagonally implicit Runge–Kutta methods that
//! preserve quadratic invariants ([`dirk`]).

pub mod cli;
pub mod diagnostics;
pub mod dirk;
pub mod error;
pub mod ieq;
pub mod scenarios;
pub mod spectral;

pub use error::{Error, Result};
