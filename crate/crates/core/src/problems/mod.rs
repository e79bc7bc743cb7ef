//! Problem instances: the Kepler two-body ODE, the Fourier-discretised KdV
//! equation, and a generic system built from dense matrices and closures.

mod dense;
pub mod kdv;
pub mod kepler;

pub use dense::{DenseGradientSystem, EnergyTerm};
