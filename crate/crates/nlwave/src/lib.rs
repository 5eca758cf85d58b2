//! Pseudo-spectral laboratory for the nonlocal bidirectional wave equation
//! `u_tt = beta * (u + eps^p u^{p+1})_xx` on a periodic box, written as the
//! first-order system `u_t = K v_x`, `v_t = K u_x + eps^p K (u^{p+1})_x`
//! with `K` the Fourier multiplier `sqrt(beta_hat)`.
//!
//! The crate provides the spectral toolbox (grids, fields, multipliers,
//! dealiased products), the kernel family behind a name registry, exact and
//! split-step time integration, energy and inequality diagnostics, and the
//! scripted experiments that turn the long-time existence scaling
//! `T ~ 1/eps^p` into desk-scale measurements.

pub mod dealias;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
mod fft;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod multiplier;
pub mod snapshot;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
pub use kernel::{builtin_kernel, Kernel};
