//! Periodic KdV `u_t = ∂_x(−u_xx − 3u²)` discretised by Fourier spectral
//! differences on an `N`-point grid.
//!
//! The semi-discrete system `u' = δ(−δ²u − 3u⊙u)` is the gradient system with
//! `D = δ`, `L = −δ²`, `E_L = Σ (u⁴ − u³)Δx`, `E_U = Σ u⁴ Δx` under the
//! inner product `⟨u, v⟩ = Δx·Σ u_j v_j`. The initial datum is a cnoidal wave.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::elliptic::{elliptic_k, jacobi_cn};
use crate::error::{Result, SavError};
use crate::linalg::{FourierDiagonalOperator, LinearParts};
use crate::sav::{Aux, GradientSystem, Splitting, Structure};

/// `min_u (u⁴ − u³) = −27/256`, attained at `u = 3/4`.
pub const LOWER_DENSITY_MIN: f64 = -27.0 / 256.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdvGrid {
    points: usize,
    domain_length: f64,
}

impl KdvGrid {
    pub fn new(points: usize, domain_length: f64) -> Result<Self> {
        if points < 2 || !points.is_power_of_two() {
            return Err(SavError::Config(format!(
                "grid size {points} must be a power of two ≥ 2"
            )));
        }
        if !(domain_length > 0.0 && domain_length.is_finite()) {
            return Err(SavError::Config(format!(
                "domain length {domain_length} must be positive"
            )));
        }
        Ok(Self { points, domain_length })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| j as f64 * self.dx()).collect()
    }
}

/// Spectral derivative `δ = F⁻¹ΞF` with the Nyquist mode zeroed.
pub fn spectral_delta(grid: &KdvGrid) -> FourierDiagonalOperator {
    let n = grid.points;
    let base = 2.0 * PI / grid.domain_length;
    let symbol = (0..n)
        .map(|k| {
            let wavenumber = match k {
                k if k < n / 2 => k as f64,
                k if k == n / 2 => 0.0,
                k => k as f64 - n as f64,
            };
            Complex64::new(0.0, base * wavenumber)
        })
        .collect();
    FourierDiagonalOperator::new(symbol)
}

/// `A = −δ³`, `g(u) = −3δ(u⊙u)`.
#[derive(Debug, Clone)]
pub struct KdvSplitting {
    linear: FourierDiagonalOperator,
    delta: FourierDiagonalOperator,
}

impl KdvSplitting {
    pub fn new(grid: &KdvGrid) -> Self {
        let delta = spectral_delta(grid);
        let linear = delta.map(|s| -s * s * s);
        Self { linear, delta }
    }
}

impl Splitting for KdvSplitting {
    fn linear(&self) -> &FourierDiagonalOperator {
        &self.linear
    }

    fn nonlinear(&self, u: &[f64]) -> Vec<f64> {
        let sq: Vec<f64> = u.iter().map(|x| -3.0 * x * x).collect();
        self.delta.apply(&sq).expect("grid dimension")
    }
}

#[derive(Debug, Clone)]
pub struct KdvSystem {
    grid: KdvGrid,
    parts: LinearParts,
    splitting: KdvSplitting,
    a_lower: f64,
    a_upper: f64,
}

impl KdvSystem {
    /// Requires `a_L > (27/256)·domain_length` (so `E_L + a_L > 0` for every
    /// state) and `a_U > 0`.
    pub fn new(grid: KdvGrid, a_lower: f64, a_upper: f64) -> Result<Self> {
        let lower_margin = a_lower + LOWER_DENSITY_MIN * grid.domain_length;
        if !(lower_margin > 0.0) {
            return Err(SavError::Domain {
                which: Aux::Lower,
                radicand: lower_margin,
            });
        }
        if !(a_upper > 0.0) {
            return Err(SavError::Domain {
                which: Aux::Upper,
                radicand: a_upper,
            });
        }
        let d = spectral_delta(&grid);
        let l = d.compose(&d).map(|s| -s);
        Ok(Self {
            grid,
            parts: LinearParts::Fourier { d, l },
            splitting: KdvSplitting::new(&grid),
            a_lower,
            a_upper,
        })
    }

    /// Domain length equal to the cnoidal wave's spatial period, `a_L = a_U = 1`.
    pub fn cnoidal_default(points: usize) -> Self {
        let length = CnoidalParams::default().spatial_period();
        Self::new(KdvGrid::new(points, length).expect("valid grid"), 1.0, 1.0).expect("admissible shifts")
    }

    pub fn grid(&self) -> &KdvGrid {
        &self.grid
    }

    /// `Σ_j (½(δu)_j² − u_j³) Δx`
    pub fn hamiltonian(&self, u: &[f64]) -> f64 {
        let du = self.apply_d(u).expect("grid dimension");
        self.grid.dx() * u.iter().zip(&du).map(|(x, dx)| 0.5 * dx * dx - x * x * x).sum::<f64>()
    }

    /// `δ(−δ²u − 3u⊙u)`
    pub fn vector_field(&self, u: &[f64]) -> Vec<f64> {
        let lu = self.apply_l(u).expect("grid dimension");
        let inner: Vec<f64> = lu.iter().zip(u).map(|(l, x)| l - 3.0 * x * x).collect();
        self.apply_d(&inner).expect("grid dimension")
    }
}

impl GradientSystem for KdvSystem {
    fn linear_parts(&self) -> &LinearParts {
        &self.parts
    }

    fn structure(&self) -> Structure {
        Structure::SkewAdjoint
    }

    fn inner_weight(&self) -> f64 {
        self.grid.dx()
    }

    fn shift(&self, which: Aux) -> f64 {
        match which {
            Aux::Lower => self.a_lower,
            Aux::Upper => self.a_upper,
        }
    }

    fn energy(&self, which: Aux, u: &[f64]) -> f64 {
        let density: fn(f64) -> f64 = match which {
            Aux::Lower => |x| x.powi(4) - x.powi(3),
            Aux::Upper => |x| x.powi(4),
        };
        self.grid.dx() * u.iter().map(|&x| density(x)).sum::<f64>()
    }

    fn grad_energy(&self, which: Aux, u: &[f64]) -> Vec<f64> {
        match which {
            Aux::Lower => u.iter().map(|&x| 4.0 * x.powi(3) - 3.0 * x * x).collect(),
            Aux::Upper => u.iter().map(|&x| 4.0 * x.powi(3)).collect(),
        }
    }

    fn splitting(&self) -> Option<&dyn Splitting> {
        Some(&self.splitting)
    }
}

/// Cnoidal wave `u(x,t) = u₀ + 2κ²k² cn²(κ(x − ct) | k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnoidalParams {
    pub modulus: f64,
    pub kappa: f64,
    pub offset: f64,
}

impl Default for CnoidalParams {
    fn default() -> Self {
        Self {
            modulus: 0.1_f64.sqrt(),
            kappa: 1.0,
            offset: 0.0,
        }
    }
}

impl CnoidalParams {
    /// `c = 6u₀ + 4(2k² − 1)κ²`
    pub fn speed(&self) -> f64 {
        6.0 * self.offset + 4.0 * (2.0 * self.modulus * self.modulus - 1.0) * self.kappa * self.kappa
    }

    /// `p = 2K(k)/κ`
    pub fn spatial_period(&self) -> f64 {
        2.0 * elliptic_k(self.modulus).expect("modulus in [0, 1)") / self.kappa
    }

    /// `T = p/|c|`
    pub fn temporal_period(&self) -> f64 {
        self.spatial_period() / self.speed().abs()
    }

    pub fn sample(&self, grid: &KdvGrid, t: f64) -> Result<Vec<f64>> {
        let (k, kappa) = (self.modulus, self.kappa);
        let c = self.speed();
        grid.nodes()
            .into_iter()
            .map(|x| {
                let cn = jacobi_cn(kappa * (x - c * t), k)?;
                Ok(self.offset + 2.0 * kappa * kappa * k * k * cn * cn)
            })
            .collect()
    }
}
