//! Kepler problem `x' = u, y' = v, u' = −x/r³, v' = −y/r³`.
//!
//! Written as `w' = D∇E(w)` with the symplectic `D`, `L = diag(0, 0, 1, 1)`,
//! `E_L ≡ 0` and `E_U(w) = 1/r`, so that `½⟨w, Lw⟩ − E_U = (u²+v²)/2 − 1/r`.
//! Since `E_L` vanishes identically, `r_L` stays at `√a_L` and `a_L` only
//! needs to be positive.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::linalg::{DenseOperator, LinearParts};
use crate::sav::{Aux, GradientSystem, Structure};

pub const PERIOD: f64 = 2.0 * PI;

/// Initial state `(x, y, u, v)`: periapsis at `r = 0.2` of an orbit with
/// eccentricity 0.8 and semi-major axis 1, hence period `2π`.
pub const INITIAL_STATE: [f64; 4] = [0.2, 0.0, 0.0, 3.0];

#[derive(Debug, Clone)]
pub struct KeplerSystem {
    parts: LinearParts,
    structure: Structure,
    a_lower: f64,
    a_upper: f64,
}

fn symplectic_d() -> DenseOperator {
    DenseOperator::from_fn(4, |i, j| match (i, j) {
        (0, 2) | (1, 3) => 1.0,
        (2, 0) | (3, 1) => -1.0,
        _ => 0.0,
    })
}

impl KeplerSystem {
    pub fn new(a_lower: f64, a_upper: f64) -> Self {
        Self {
            parts: LinearParts::Dense {
                d: symplectic_d(),
                l: DenseOperator::diagonal(&[0.0, 0.0, 1.0, 1.0]),
            },
            structure: Structure::SkewAdjoint,
            a_lower,
            a_upper,
        }
    }

    /// Same energy with `D = −I`: a gradient flow that dissipates it.
    pub fn dissipative(a_lower: f64, a_upper: f64) -> Self {
        let mut sys = Self::new(a_lower, a_upper);
        let LinearParts::Dense { d, .. } = &mut sys.parts else {
            unreachable!()
        };
        *d = DenseOperator::diagonal(&[-1.0; 4]);
        sys.structure = Structure::NegativeSemidefinite;
        sys
    }
}

impl Default for KeplerSystem {
    fn default() -> Self {
        Self::new(1.0, 1.0)
    }
}

fn radius(w: &[f64]) -> f64 {
    w[0].hypot(w[1])
}

impl GradientSystem for KeplerSystem {
    fn linear_parts(&self) -> &LinearParts {
        &self.parts
    }

    fn structure(&self) -> Structure {
        self.structure
    }

    fn inner_weight(&self) -> f64 {
        1.0
    }

    fn shift(&self, which: Aux) -> f64 {
        match which {
            Aux::Lower => self.a_lower,
            Aux::Upper => self.a_upper,
        }
    }

    fn energy(&self, which: Aux, w: &[f64]) -> f64 {
        match which {
            Aux::Lower => 0.0,
            Aux::Upper => 1.0 / radius(w),
        }
    }

    fn grad_energy(&self, which: Aux, w: &[f64]) -> Vec<f64> {
        match which {
            Aux::Lower => vec![0.0; 4],
            Aux::Upper => {
                let r3 = radius(w).powi(3);
                vec![-w[0] / r3, -w[1] / r3, 0.0, 0.0]
            }
        }
    }
}

/// Right-hand side of the Kepler ODE written out directly.
pub fn kepler_vector_field(w: &[f64]) -> [f64; 4] {
    let r3 = radius(w).powi(3);
    [w[2], w[3], -w[0] / r3, -w[1] / r3]
}

/// Steps per period of the reference trajectory.
const REFERENCE_STEPS: usize = 1 << 21;
/// Reference samples stored per period.
const REFERENCE_SAMPLES: usize = 1 << 12;

fn rk4(w: [f64; 4], h: f64) -> [f64; 4] {
    let add = |a: [f64; 4], s: f64, b: [f64; 4]| -> [f64; 4] {
        [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
    };
    let k1 = kepler_vector_field(&w);
    let k2 = kepler_vector_field(&add(w, 0.5 * h, k1));
    let k3 = kepler_vector_field(&add(w, 0.5 * h, k2));
    let k4 = kepler_vector_field(&add(w, h, k3));
    let mut out = w;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn reference_table() -> &'static [[f64; 4]] {
    static TABLE: OnceLock<Vec<[f64; 4]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = PERIOD / REFERENCE_STEPS as f64;
        let stride = REFERENCE_STEPS / REFERENCE_SAMPLES;
        let mut w = INITIAL_STATE;
        let mut out = Vec::with_capacity(REFERENCE_SAMPLES + 1);
        out.push(w);
        for step in 1..=REFERENCE_STEPS {
            w = rk4(w, h);
            if step % stride == 0 {
                out.push(w);
            }
        }
        out
    })
}

/// High-accuracy trajectory from [`INITIAL_STATE`], for error measurement.
///
/// Classical RK4 with `2²¹` steps per period is integrated once and cached;
/// times between stored samples are reached by further RK4 steps from the
/// nearest earlier sample. Times outside `[0, 2π)` are folded by periodicity.
pub fn kepler_reference(t: f64) -> [f64; 4] {
    let table = reference_table();
    let phase = t.rem_euclid(PERIOD);
    let sample_dt = PERIOD / REFERENCE_SAMPLES as f64;
    let idx = ((phase / sample_dt).floor() as usize).min(REFERENCE_SAMPLES);
    let mut w = table[idx];
    let remaining = phase - idx as f64 * sample_dt;
    if remaining > 0.0 {
        let fine = PERIOD / REFERENCE_STEPS as f64;
        let steps = (remaining / fine).ceil().max(1.0) as usize;
        let h = remaining / steps as f64;
        for _ in 0..steps {
            w = rk4(w, h);
        }
    }
    w
}
