//! Gradient systems `u' = D ∇E(u)` and their scalar-auxiliary-variable form.
//!
//! The energy is split as `E(u) = ½⟨u, Lu⟩ + E_L(u) − E_U(u)` with `L`
//! self-adjoint positive semidefinite and `E_L`, `E_U` bounded below. With
//! `r_X = √(E_X(u) + a_X)` the augmented state `z = (u, r_L, r_U)` evolves by
//!
//! ```text
//! z' = 𝓛(u) ∇Ẽ(z),   Ẽ(z) = ½⟨u, Lu⟩ + r_L² − r_U²,
//! ```
//!
//! where `𝓛(u) = [I; Φ_L; Φ_U] · D · [I, Φ*_L, Φ*_U]` and
//! `φ_X = ∇E_X(u) / (2√(E_X(u) + a_X))`. `𝓛(u)` is skew-adjoint (resp. negative
//! semidefinite) whenever `D` is, for every `u`. [`FrozenOperator`] applies it
//! without assembling the block matrix.

use std::fmt;

use crate::error::{Result, SavError};
use crate::linalg::{weighted_dot, FourierDiagonalOperator, LinearParts};

/// Radicands at or below this are rejected instead of clamped.
pub const RADICAND_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aux {
    /// The part `E_L` (enters the energy with a plus sign).
    Lower,
    /// The part `E_U` (enters the energy with a minus sign).
    Upper,
}

impl fmt::Display for Aux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aux::Lower => "L",
            Aux::Upper => "U",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// `⟨v, Dw⟩ = −⟨Dv, w⟩`: energy is conserved.
    SkewAdjoint,
    /// `⟨v, Dv⟩ ≤ 0`: energy is dissipated.
    NegativeSemidefinite,
}

/// Linear/nonlinear splitting `u' = A u + g(u)` with `A` diagonal in Fourier space.
pub trait Splitting: Send + Sync {
    fn linear(&self) -> &FourierDiagonalOperator;
    fn nonlinear(&self, u: &[f64]) -> Vec<f64>;
}

/// A problem instance. Gradients are taken with respect to the weighted inner
/// product `⟨a, b⟩ = weight · Σ a_j b_j`.
pub trait GradientSystem: Send + Sync {
    fn linear_parts(&self) -> &LinearParts;
    fn structure(&self) -> Structure;
    fn inner_weight(&self) -> f64;
    /// The shift constant `a_X`.
    fn shift(&self, which: Aux) -> f64;
    fn energy(&self, which: Aux, u: &[f64]) -> f64;
    fn grad_energy(&self, which: Aux, u: &[f64]) -> Vec<f64>;

    fn splitting(&self) -> Option<&dyn Splitting> {
        None
    }

    fn dim(&self) -> usize {
        self.linear_parts().dim()
    }

    fn apply_d(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.linear_parts().apply_d(v)
    }

    fn apply_l(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.linear_parts().apply_l(v)
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        weighted_dot(a, b, self.inner_weight())
    }
}

/// Element of `Z = V × ℝ × ℝ`: a state with its two auxiliary scalars, or a
/// tangent vector of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub u: Vec<f64>,
    pub r_lower: f64,
    pub r_upper: f64,
}

impl AugmentedState {
    pub fn new(u: Vec<f64>, r_lower: f64, r_upper: f64) -> Self {
        Self { u, r_lower, r_upper }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n], 0.0, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn r(&self, which: Aux) -> f64 {
        match which {
            Aux::Lower => self.r_lower,
            Aux::Upper => self.r_upper,
        }
    }

    /// Flatten to `(u_0, …, u_{n−1}, r_L, r_U)`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.u.len() + 2);
        v.extend_from_slice(&self.u);
        v.push(self.r_lower);
        v.push(self.r_upper);
        v
    }

    pub fn from_flat(v: &[f64]) -> Self {
        let n = v.len() - 2;
        Self::new(v[..n].to_vec(), v[n], v[n + 1])
    }

    /// `self + s · other`
    pub fn add_scaled(&self, s: f64, other: &AugmentedState) -> Self {
        Self::new(
            self.u.iter().zip(&other.u).map(|(a, b)| a + s * b).collect(),
            self.r_lower + s * other.r_lower,
            self.r_upper + s * other.r_upper,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(
            self.u.iter().map(|a| s * a).collect(),
            s * self.r_lower,
            s * self.r_upper,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|x| x.is_finite()) && self.r_lower.is_finite() && self.r_upper.is_finite()
    }
}

fn radicand<S: GradientSystem + ?Sized>(sys: &S, u: &[f64], which: Aux) -> Result<f64> {
    let value = sys.energy(which, u) + sys.shift(which);
    if value > RADICAND_GUARD {
        Ok(value)
    } else {
        Err(SavError::Domain { which, radicand: value })
    }
}

/// `z = (u0, √(E_L(u0)+a_L), √(E_U(u0)+a_U))`
pub fn init_augmented<S: GradientSystem + ?Sized>(sys: &S, u0: &[f64]) -> Result<AugmentedState> {
    check_dim(sys, u0)?;
    let r_lower = radicand(sys, u0, Aux::Lower)?.sqrt();
    let r_upper = radicand(sys, u0, Aux::Upper)?.sqrt();
    Ok(AugmentedState::new(u0.to_vec(), r_lower, r_upper))
}

/// `φ_X(u) = ∇E_X(u) / (2√(E_X(u) + a_X))`
pub fn phi<S: GradientSystem + ?Sized>(sys: &S, u: &[f64], which: Aux) -> Result<Vec<f64>> {
    let denom = 2.0 * radicand(sys, u, which)?.sqrt();
    Ok(sys.grad_energy(which, u).into_iter().map(|g| g / denom).collect())
}

/// `Ẽ(z) = ½⟨u, Lu⟩ + r_L² − r_U²`
pub fn modified_energy<S: GradientSystem + ?Sized>(sys: &S, z: &AugmentedState) -> f64 {
    let lu = sys.apply_l(&z.u).expect("state dimension matches system");
    0.5 * sys.inner(&z.u, &lu) + z.r_lower * z.r_lower - z.r_upper * z.r_upper
}

/// `E(u) = ½⟨u, Lu⟩ + E_L(u) − E_U(u)`
pub fn original_energy<S: GradientSystem + ?Sized>(sys: &S, u: &[f64]) -> f64 {
    let lu = sys.apply_l(u).expect("state dimension matches system");
    0.5 * sys.inner(u, &lu) + sys.energy(Aux::Lower, u) - sys.energy(Aux::Upper, u)
}

/// `∇E(u) = Lu + ∇E_L(u) − ∇E_U(u)`
pub fn original_gradient<S: GradientSystem + ?Sized>(sys: &S, u: &[f64]) -> Result<Vec<f64>> {
    let mut g = sys.apply_l(u)?;
    for (gi, (l, up)) in g.iter_mut().zip(
        sys.grad_energy(Aux::Lower, u)
            .iter()
            .zip(sys.grad_energy(Aux::Upper, u)),
    ) {
        *gi += l - up;
    }
    Ok(g)
}

/// Right-hand side `D ∇E(u)` of the original system.
pub fn original_rhs<S: GradientSystem + ?Sized>(sys: &S, u: &[f64]) -> Result<Vec<f64>> {
    sys.apply_d(&original_gradient(sys, u)?)
}

/// `∇Ẽ(z) = (Lu, 2r_L, −2r_U)`
pub fn grad_modified_energy<S: GradientSystem + ?Sized>(sys: &S, z: &AugmentedState) -> Result<AugmentedState> {
    Ok(AugmentedState::new(
        sys.apply_l(&z.u)?,
        2.0 * z.r_lower,
        -2.0 * z.r_upper,
    ))
}

/// Inner product on `Z`: weighted on the state part, plain on the scalars.
pub fn z_inner<S: GradientSystem + ?Sized>(sys: &S, a: &AugmentedState, b: &AugmentedState) -> f64 {
    sys.inner(&a.u, &b.u) + a.r_lower * b.r_lower + a.r_upper * b.r_upper
}

/// `𝓛(ū)` with `φ_L(ū)`, `φ_U(ū)` evaluated once.
#[derive(Debug, Clone)]
pub struct FrozenOperator<'a, S: GradientSystem + ?Sized> {
    sys: &'a S,
    phi_lower: Vec<f64>,
    phi_upper: Vec<f64>,
}

impl<'a, S: GradientSystem + ?Sized> FrozenOperator<'a, S> {
    pub fn new(sys: &'a S, u_bar: &[f64]) -> Result<Self> {
        check_dim(sys, u_bar)?;
        Ok(Self {
            sys,
            phi_lower: phi(sys, u_bar, Aux::Lower)?,
            phi_upper: phi(sys, u_bar, Aux::Upper)?,
        })
    }

    pub fn phi(&self, which: Aux) -> &[f64] {
        match which {
            Aux::Lower => &self.phi_lower,
            Aux::Upper => &self.phi_upper,
        }
    }

    /// `𝓛(ū) w`: `g = w_u + w_L φ_L + w_U φ_U`, `u̇ = D g`, `ṙ_X = ⟨φ_X, u̇⟩`.
    pub fn apply(&self, w: &AugmentedState) -> Result<AugmentedState> {
        let g: Vec<f64> =
            w.u.iter()
                .zip(self.phi_lower.iter().zip(&self.phi_upper))
                .map(|(wu, (pl, pu))| wu + w.r_lower * pl + w.r_upper * pu)
                .collect();
        let du = self.sys.apply_d(&g)?;
        let dr_lower = self.sys.inner(&self.phi_lower, &du);
        let dr_upper = self.sys.inner(&self.phi_upper, &du);
        Ok(AugmentedState::new(du, dr_lower, dr_upper))
    }
}

/// `𝓛(ū) ∇Ẽ(z)`
pub fn augmented_rhs<S: GradientSystem + ?Sized>(sys: &S, z: &AugmentedState, u_bar: &[f64]) -> Result<AugmentedState> {
    FrozenOperator::new(sys, u_bar)?.apply(&grad_modified_energy(sys, z)?)
}

pub(crate) fn check_dim<S: GradientSystem + ?Sized>(sys: &S, u: &[f64]) -> Result<()> {
    if u.len() == sys.dim() {
        Ok(())
    } else {
        Err(SavError::DimensionMismatch {
            expected: sys.dim(),
            got: u.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{kdv::KdvSystem, kepler::KeplerSystem, DenseGradientSystem};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    const W0_TEXTBOOK: [f64; 4] = [0.2, 0.0, 0.0, 0.3];

    fn random_vec(rng: &mut StdRng, n: usize, scale: f64) -> Vec<f64> {
        (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn kepler_init_values() {
        let sys = KeplerSystem::new(1.0, 1.0);
        let z = init_augmented(&sys, &W0_TEXTBOOK).unwrap();
        assert_eq!(z.r_lower, 1.0);
        assert!((z.r_upper - 6.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kepler_phi_upper() {
        let sys = KeplerSystem::new(1.0, 1.0);
        let p = phi(&sys, &W0_TEXTBOOK, Aux::Upper).unwrap();
        let expect = -25.0 / (2.0 * 6.0_f64.sqrt());
        assert!((p[0] - expect).abs() < 1e-13);
        assert_eq!(&p[1..], &[0.0, 0.0, 0.0]);
        assert!(phi(&sys, &W0_TEXTBOOK, Aux::Lower).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn kepler_energies() {
        let sys = KeplerSystem::new(1.0, 1.0);
        let z = init_augmented(&sys, &W0_TEXTBOOK).unwrap();
        assert!((modified_energy(&sys, &z) + 4.955).abs() < 1e-13);
        assert!((original_energy(&sys, &W0_TEXTBOOK) + 4.955).abs() < 1e-13);
    }

    #[test]
    fn zero_state_energies() {
        let sys = KeplerSystem::new(1.0, 1.0);
        let z = AugmentedState::new(vec![0.0; 4], 1.0, 1.0);
        assert_eq!(modified_energy(&sys, &z), 0.0);
        let kdv = KdvSystem::cnoidal_default(16);
        assert_eq!(original_energy(&kdv, &[0.0; 16]), 0.0);
    }

    #[test]
    fn radicand_guard_is_an_error() {
        // E_U = 1/r > 0, so a_U = -1/r makes the radicand exactly zero.
        let sys = KeplerSystem::new(1.0, -5.0);
        assert!(matches!(
            init_augmented(&sys, &W0_TEXTBOOK),
            Err(SavError::Domain { which: Aux::Upper, .. })
        ));
        assert!(matches!(
            phi(&sys, &W0_TEXTBOOK, Aux::Upper),
            Err(SavError::Domain { .. })
        ));
    }

    #[test]
    fn init_checks_dimension() {
        let sys = KeplerSystem::new(1.0, 1.0);
        assert!(matches!(
            init_augmented(&sys, &[1.0, 2.0]),
            Err(SavError::DimensionMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn exact_initialisation_identity() {
        let mut rng = StdRng::seed_from_u64(3);
        let kdv = KdvSystem::cnoidal_default(16);
        for _ in 0..20 {
            let u = random_vec(&mut rng, 16, 0.6);
            let z = init_augmented(&kdv, &u).unwrap();
            let lhs = modified_energy(&kdv, &z);
            let rhs = original_energy(&kdv, &u) + kdv.shift(Aux::Lower) - kdv.shift(Aux::Upper);
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn phi_matches_finite_differences() {
        let mut rng = StdRng::seed_from_u64(5);
        let kdv = KdvSystem::cnoidal_default(16);
        let kep = KeplerSystem::new(1.0, 1.0);
        let h = 1e-6;
        let systems: [(&dyn GradientSystem, Vec<f64>); 2] =
            [(&kdv, random_vec(&mut rng, 16, 0.5)), (&kep, vec![0.7, -0.4, 0.3, 1.1])];
        for (sys, u) in systems {
            for which in [Aux::Lower, Aux::Upper] {
                let v = random_vec(&mut rng, u.len(), 1.0);
                let plus: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + h * b).collect();
                let minus: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - h * b).collect();
                let fd = (sys.energy(which, &plus) - sys.energy(which, &minus)) / (2.0 * h);
                let root = (sys.energy(which, &u) + sys.shift(which)).sqrt();
                let analytic = sys.inner(&phi(sys, &u, which).unwrap(), &v) * 2.0 * root;
                if fd.abs() > 1e-12 {
                    assert!((analytic - fd).abs() <= 1e-6 * fd.abs(), "{which}: {analytic} vs {fd}");
                } else {
                    assert!(analytic.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn constant_energies_reduce_to_linear_flow() {
        let sys = DenseGradientSystem::random_quadratic_only(5, 9);
        let mut rng = StdRng::seed_from_u64(1);
        let z = AugmentedState::new(random_vec(&mut rng, 5, 1.0), 0.7, 1.3);
        let ubar = random_vec(&mut rng, 5, 1.0);
        let rhs = augmented_rhs(&sys, &z, &ubar).unwrap();
        let dlu = sys.apply_d(&sys.apply_l(&z.u).unwrap()).unwrap();
        for (a, b) in rhs.u.iter().zip(&dlu) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!((rhs.r_lower, rhs.r_upper), (0.0, 0.0));
    }

    #[test]
    fn exact_flow_consistency_kepler() {
        let sys = KeplerSystem::new(1.0, 1.0);
        let z = init_augmented(&sys, &W0_TEXTBOOK).unwrap();
        let rhs = augmented_rhs(&sys, &z, &W0_TEXTBOOK).unwrap();
        let expect = [0.0, 0.3, -25.0, 0.0];
        for (a, b) in rhs.u.iter().zip(&expect) {
            assert!((a - b).abs() <= 1e-12 * 25.0);
        }
    }

    #[test]
    fn exact_flow_consistency_random_states() {
        let mut rng = StdRng::seed_from_u64(8);
        let kdv = KdvSystem::cnoidal_default(16);
        let kep = KeplerSystem::new(1.0, 1.0);
        for _ in 0..20 {
            let u = random_vec(&mut rng, 16, 0.5);
            let z = init_augmented(&kdv, &u).unwrap();
            let a = augmented_rhs(&kdv, &z, &u).unwrap().u;
            let b = original_rhs(&kdv, &u).unwrap();
            let scale = crate::linalg::max_abs(&b);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12 * scale);
            }
            let w = vec![
                rng.random_range(0.3..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let z = init_augmented(&kep, &w).unwrap();
            let a = augmented_rhs(&kep, &z, &w).unwrap().u;
            let b = original_rhs(&kep, &w).unwrap();
            let scale = crate::linalg::max_abs(&b);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn modified_energy_is_quadratic() {
        let mut rng = StdRng::seed_from_u64(4);
        let kdv = KdvSystem::cnoidal_default(16);
        for _ in 0..10 {
            let z = AugmentedState::new(random_vec(&mut rng, 16, 1.0), rng.random(), rng.random());
            let alpha: f64 = rng.random_range(-3.0..3.0);
            let scaled = modified_energy(&kdv, &z.scale(alpha));
            let base = modified_energy(&kdv, &z);
            assert!((scaled - alpha * alpha * base).abs() <= 1e-13 * (1.0 + scaled.abs()));
        }
    }

    #[test]
    fn flat_round_trip() {
        let z = AugmentedState::new(vec![1.0, 2.0, 3.0], 4.0, 5.0);
        assert_eq!(z.to_flat(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(AugmentedState::from_flat(&z.to_flat()), z);
    }
}
