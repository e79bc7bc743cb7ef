//! Linearly implicit, energy-preserving integrators for gradient systems
//! `u' = D∇E(u)` based on scalar auxiliary variables (SAV).
//!
//! The energy is split as `E = ½⟨u, Lu⟩ + E_L − E_U` with `E_L`, `E_U` bounded
//! below. With `r_X = √(E_X + a_X)` the system is rewritten for
//! `z = (u, r_L, r_U)` as `z' = 𝓛(u)∇Ẽ(z)` with the quadratic modified energy
//! `Ẽ = ½⟨u, Lu⟩ + r_L² − r_U²`. Freezing `𝓛` at a predicted state turns each
//! step into a linear solve while keeping `Ẽ` exactly conserved.
//!
//! - [`cn`]: second-order Crank–Nicolson step with three midpoint predictors.
//! - [`rk`]: fourth-order step from the two-stage Gauss method.
//! - [`problems`]: Kepler two-body problem and spectrally discretised KdV.
//! - [`harness`]: experiment configuration, CSV output and convergence sweeps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cn;
pub mod elliptic;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod phi;
pub mod problems;
pub mod record;
pub mod rk;
pub mod sav;

pub use error::{Result, SavError};
pub use record::{RecordOptions, RunRecord, RunRow};
pub use sav::{AugmentedState, GradientSystem};
