//! Linear-operator backends and the reusable solver for `J = I − α·D·L`.
//!
//! A problem supplies its structure operator `D` and quadratic-energy
//! operator `L` either as dense matrices or as Fourier multipliers.
//! [`LinearParts::plan_j`] factors (dense) or inverts symbol-wise (Fourier)
//! once per step size; the resulting [`LinearSolvePlan`] is immutable and can
//! be shared between threads.

mod dense;
pub mod fft;
mod fourier;

pub use dense::{solve_dense, DenseOperator, LuFactors};
pub use fourier::FourierDiagonalOperator;

use num_complex::Complex64;

use crate::error::{Result, SavError};

const SYMBOL_GUARD: f64 = 1e-14;

/// The two linear operators of a gradient system, in one backend.
#[derive(Debug, Clone)]
pub enum LinearParts {
    Dense {
        d: DenseOperator,
        l: DenseOperator,
    },
    Fourier {
        d: FourierDiagonalOperator,
        l: FourierDiagonalOperator,
    },
}

impl LinearParts {
    pub fn dim(&self) -> usize {
        match self {
            LinearParts::Dense { d, .. } => d.dim(),
            LinearParts::Fourier { d, .. } => d.dim(),
        }
    }

    pub fn apply_d(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearParts::Dense { d, .. } => d.apply(v),
            LinearParts::Fourier { d, .. } => d.apply(v),
        }
    }

    pub fn apply_l(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearParts::Dense { l, .. } => l.apply(v),
            LinearParts::Fourier { l, .. } => l.apply(v),
        }
    }

    /// `v − α·D·L·v`
    pub fn apply_j(&self, alpha: f64, v: &[f64]) -> Result<Vec<f64>> {
        let dlv = self.apply_d(&self.apply_l(v)?)?;
        Ok(v.iter().zip(&dlv).map(|(a, b)| a - alpha * b).collect())
    }

    pub fn plan_j(&self, alpha: f64) -> Result<LinearSolvePlan> {
        let backend = match self {
            LinearParts::Dense { d, l } => {
                let dl = d.matmul(l);
                let n = dl.dim();
                let j = DenseOperator::from_fn(n, |r, c| {
                    let id = if r == c { 1.0 } else { 0.0 };
                    id - alpha * dl[(r, c)]
                });
                let lu = LuFactors::factor(&j).map_err(|_| SavError::SingularOperator { alpha })?;
                PlanBackend::DenseLu(lu)
            }
            LinearParts::Fourier { d, l } => {
                let mut inv = Vec::with_capacity(d.dim());
                for (sd, sl) in d.symbol().iter().zip(l.symbol()) {
                    let den = Complex64::new(1.0, 0.0) - alpha * sd * sl;
                    if den.norm() < SYMBOL_GUARD {
                        return Err(SavError::SingularOperator { alpha });
                    }
                    inv.push(den.inv());
                }
                PlanBackend::Fourier(FourierDiagonalOperator::new(inv))
            }
        };
        Ok(LinearSolvePlan { alpha, backend })
    }
}

#[derive(Debug, Clone)]
enum PlanBackend {
    DenseLu(LuFactors),
    Fourier(FourierDiagonalOperator),
}

/// Reusable solver for `(I − α·D·L) w = f` at a fixed `α`.
#[derive(Debug, Clone)]
pub struct LinearSolvePlan {
    alpha: f64,
    backend: PlanBackend,
}

impl LinearSolvePlan {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn solve(&self, f: &[f64]) -> Result<Vec<f64>> {
        match &self.backend {
            PlanBackend::DenseLu(lu) => lu.solve(f),
            PlanBackend::Fourier(op) => op.apply(f),
        }
    }
}

/// `Σ_j a_j b_j · weight`
pub fn weighted_dot(a: &[f64], b: &[f64], weight: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    weight * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn kepler_like() -> LinearParts {
        let d = DenseOperator::from_fn(4, |i, j| match (i, j) {
            (0, 2) | (1, 3) => 1.0,
            (2, 0) | (3, 1) => -1.0,
            _ => 0.0,
        });
        LinearParts::Dense {
            d,
            l: DenseOperator::diagonal(&[0.0, 0.0, 1.0, 1.0]),
        }
    }

    fn kdv_like(n: usize, length: f64) -> LinearParts {
        let wave = 2.0 * std::f64::consts::PI / length;
        let sym: Vec<Complex64> = (0..n)
            .map(|k| {
                let m = if k < n / 2 {
                    k as f64
                } else if k == n / 2 {
                    0.0
                } else {
                    k as f64 - n as f64
                };
                Complex64::new(0.0, wave * m)
            })
            .collect();
        let d = FourierDiagonalOperator::new(sym);
        let l = d.compose(&d).map(|s| -s);
        LinearParts::Fourier { d, l }
    }

    #[test]
    fn zero_alpha_is_identity_solve() {
        for parts in [kepler_like(), kdv_like(16, 3.2)] {
            let plan = parts.plan_j(0.0).unwrap();
            let f: Vec<f64> = (0..parts.dim()).map(|j| j as f64 * 0.5 - 1.0).collect();
            let w = plan.solve(&f).unwrap();
            for (a, b) in w.iter().zip(&f) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn round_trip_both_backends() {
        let mut rng = StdRng::seed_from_u64(11);
        for (parts, alpha) in [
            (kepler_like(), 0.01),
            (kdv_like(16, 3.2249), 0.003),
            (kdv_like(16, 3.2249), -0.5),
        ] {
            let plan = parts.plan_j(alpha).unwrap();
            for _ in 0..20 {
                let v = random_vec(&mut rng, parts.dim());
                let back = plan.solve(&parts.apply_j(alpha, &v).unwrap()).unwrap();
                let err: Vec<f64> = back.iter().zip(&v).map(|(a, b)| a - b).collect();
                assert!(norm2(&err) <= 1e-12 * norm2(&v));
                let f = random_vec(&mut rng, parts.dim());
                let w = plan.solve(&f).unwrap();
                let res: Vec<f64> = parts
                    .apply_j(alpha, &w)
                    .unwrap()
                    .iter()
                    .zip(&f)
                    .map(|(a, b)| a - b)
                    .collect();
                assert!(norm2(&res) <= 1e-12 * norm2(&f));
            }
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let plan = kdv_like(16, 3.0).plan_j(0.1).unwrap();
        assert!(plan.solve(&[0.0; 16]).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn kdv_denominators_never_vanish() {
        // symbol of D·L is (iκ)(κ²) = iκ³, so |1 − α iκ³| ≥ 1 for real α
        let LinearParts::Fourier { d, l } = kdv_like(16, 3.2249) else {
            unreachable!()
        };
        for alpha in [-1.0, 1e-3, 0.5, 10.0] {
            for (sd, sl) in d.symbol().iter().zip(l.symbol()) {
                let den = Complex64::new(1.0, 0.0) - alpha * sd * sl;
                assert!(den.norm() >= 1.0 - 1e-15);
                assert!(den.re == 1.0);
            }
        }
        assert_eq!(d.symbol()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn singular_dense_plan() {
        // J = I − α·I·I is singular at α = 1
        let parts = LinearParts::Dense {
            d: DenseOperator::identity(3),
            l: DenseOperator::identity(3),
        };
        assert_eq!(
            parts.plan_j(1.0).unwrap_err(),
            SavError::SingularOperator { alpha: 1.0 }
        );
    }

    #[test]
    fn singular_fourier_plan() {
        let one = FourierDiagonalOperator::new(vec![Complex64::new(1.0, 0.0); 4]);
        let parts = LinearParts::Fourier { d: one.clone(), l: one };
        assert!(matches!(parts.plan_j(1.0), Err(SavError::SingularOperator { .. })));
    }
}
