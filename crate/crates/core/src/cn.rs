//! Second-order linearly implicit Crank–Nicolson SAV scheme.
//!
//! One step solves
//!
//! ```text
//! (zⁿ⁺¹ − zⁿ)/Δt = 𝓛(ū) ∇Ẽ((zⁿ⁺¹ + zⁿ)/2)
//! ```
//!
//! with `𝓛` frozen at a predicted midpoint `ū ≈ u(tₙ + Δt/2)`. Because `Ẽ` is
//! quadratic and `𝓛(ū)` is skew (or negative semidefinite), `Ẽ` is conserved
//! (or dissipated) for any `ū`.
//!
//! The linear system is reduced by block elimination to three solves with
//! `J = I − (Δt/2)DL`, a 2×2 system for `(r_L, r_U)`, and a vector update:
//!
//! ```text
//! uⁿ⁺¹ = (2J⁻¹ − I)uⁿ + Δt(r_Lⁿ⁺¹ + r_Lⁿ) J⁻¹Dφ_L − Δt(r_Uⁿ⁺¹ + r_Uⁿ) J⁻¹Dφ_U
//! ```

use crate::error::{Result, SavError};
use crate::linalg::{FourierDiagonalOperator, LinearSolvePlan};
use crate::phi::phi1;
use crate::record::{RecordOptions, Recorder, RunRecord};
use crate::sav::{original_rhs, phi, AugmentedState, Aux, GradientSystem};

const DET_GUARD: f64 = 1e-14;

/// How `ū^{n+1/2}` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predictor {
    /// `u⁰` at `n = 0`, `(3uⁿ − uⁿ⁻¹)/2` afterwards.
    Extrapolation,
    /// `uⁿ + (Δt/2) D∇E(uⁿ)`.
    HalfStepExplicitEuler,
    /// `e^{hA}uⁿ + hφ₁(hA)g(uⁿ)` with `h = Δt/2`; needs a splitting.
    HalfStepExponentialEuler,
}

impl Predictor {
    /// Rejects predictors the problem cannot support.
    pub fn validate<S: GradientSystem + ?Sized>(self, sys: &S) -> Result<()> {
        match self {
            Predictor::HalfStepExponentialEuler if sys.splitting().is_none() => Err(SavError::SplittingUnavailable),
            _ => Ok(()),
        }
    }
}

fn exponential_euler_operator<S: GradientSystem + ?Sized>(sys: &S, h: f64) -> Result<FourierDiagonalOperator> {
    let split = sys.splitting().ok_or(SavError::SplittingUnavailable)?;
    Ok(split.linear().map(|s| phi1(h * s)))
}

fn exponential_euler<S: GradientSystem + ?Sized>(
    sys: &S,
    phi1_op: &FourierDiagonalOperator,
    u: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    // e^{hA}u + hφ₁(hA)g(u) = u + hφ₁(hA)(Au + g(u))
    let split = sys.splitting().ok_or(SavError::SplittingUnavailable)?;
    let au = split.linear().apply(u)?;
    let g = split.nonlinear(u);
    let f: Vec<f64> = au.iter().zip(&g).map(|(a, b)| a + b).collect();
    let incr = phi1_op.apply(&f)?;
    Ok(u.iter().zip(&incr).map(|(x, d)| x + h * d).collect())
}

/// Predicted midpoint `ū^{n+1/2}`. `previous` is `uⁿ⁻¹`, required for
/// extrapolation when `step ≥ 1`.
pub fn predict_half<S: GradientSystem + ?Sized>(
    pred: Predictor,
    sys: &S,
    z: &AugmentedState,
    previous: Option<&[f64]>,
    step: usize,
    dt: f64,
) -> Result<Vec<f64>> {
    let cached = match pred {
        Predictor::HalfStepExponentialEuler => Some(exponential_euler_operator(sys, 0.5 * dt)?),
        _ => None,
    };
    predict_with(pred, sys, cached.as_ref(), z, previous, step, dt)
}

fn predict_with<S: GradientSystem + ?Sized>(
    pred: Predictor,
    sys: &S,
    phi1_op: Option<&FourierDiagonalOperator>,
    z: &AugmentedState,
    previous: Option<&[f64]>,
    step: usize,
    dt: f64,
) -> Result<Vec<f64>> {
    match pred {
        Predictor::Extrapolation => {
            if step == 0 {
                return Ok(z.u.clone());
            }
            let prev = previous.ok_or(SavError::MissingHistory { step })?;
            Ok(z.u.iter().zip(prev).map(|(a, b)| 1.5 * a - 0.5 * b).collect())
        }
        Predictor::HalfStepExplicitEuler => {
            let f = original_rhs(sys, &z.u)?;
            Ok(z.u.iter().zip(&f).map(|(a, b)| a + 0.5 * dt * b).collect())
        }
        Predictor::HalfStepExponentialEuler => {
            let op = phi1_op.ok_or(SavError::SplittingUnavailable)?;
            exponential_euler(sys, op, &z.u, 0.5 * dt)
        }
    }
}

/// Per-`Δt` state: the factored `J = I − (Δt/2)DL`.
#[derive(Debug, Clone)]
pub struct CnWorkspace {
    dt: f64,
    plan: LinearSolvePlan,
}

impl CnWorkspace {
    pub fn new<S: GradientSystem + ?Sized>(sys: &S, dt: f64) -> Result<Self> {
        Ok(Self {
            dt,
            plan: sys.linear_parts().plan_j(0.5 * dt)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn plan(&self) -> &LinearSolvePlan {
        &self.plan
    }
}

/// One step of the scheme by block Gauss elimination.
pub fn cn_step<S: GradientSystem + ?Sized>(
    sys: &S,
    z: &AugmentedState,
    u_bar: &[f64],
    ws: &CnWorkspace,
) -> Result<AugmentedState> {
    let dt = ws.dt;
    let phi_l = phi(sys, u_bar, Aux::Lower)?;
    let phi_u = phi(sys, u_bar, Aux::Upper)?;

    // (1) J⁻¹uⁿ, J⁻¹Dφ_L, J⁻¹Dφ_U
    let ju = ws.plan.solve(&z.u)?;
    let jl = ws.plan.solve(&sys.apply_d(&phi_l)?)?;
    let ju_d = ws.plan.solve(&sys.apply_d(&phi_u)?)?;

    // (2) 2×2 system for (r_Lⁿ⁺¹, r_Uⁿ⁺¹)
    let m_ll = sys.inner(&phi_l, &jl);
    let m_lu = sys.inner(&phi_l, &ju_d);
    let m_ul = sys.inner(&phi_u, &jl);
    let m_uu = sys.inner(&phi_u, &ju_d);
    let drift: Vec<f64> = ju.iter().zip(&z.u).map(|(a, b)| a - b).collect();
    let q_l = sys.inner(&phi_l, &drift);
    let q_u = sys.inner(&phi_u, &drift);

    let (a11, a12) = (1.0 - dt * m_ll, dt * m_lu);
    let (a21, a22) = (-dt * m_ul, 1.0 + dt * m_uu);
    let rhs_l = 2.0 * q_l + (1.0 + dt * m_ll) * z.r_lower - dt * m_lu * z.r_upper;
    let rhs_u = 2.0 * q_u + dt * m_ul * z.r_lower + (1.0 - dt * m_uu) * z.r_upper;
    let det = a11 * a22 - a12 * a21;
    if !(det.abs() >= DET_GUARD) {
        return Err(SavError::SingularMatrix {
            detail: format!("2x2 auxiliary system [[{a11:e}, {a12:e}], [{a21:e}, {a22:e}]] has determinant {det:e}"),
        });
    }
    let r_lower = (rhs_l * a22 - a12 * rhs_u) / det;
    let r_upper = (a11 * rhs_u - a21 * rhs_l) / det;

    // (3) back substitution for uⁿ⁺¹
    let s_l = dt * (r_lower + z.r_lower);
    let s_u = dt * (r_upper + z.r_upper);
    let u = ju
        .iter()
        .zip(&z.u)
        .zip(jl.iter().zip(&ju_d))
        .map(|((a, u), (pl, pu))| 2.0 * a - u + s_l * pl - s_u * pu)
        .collect();
    Ok(AugmentedState::new(u, r_lower, r_upper))
}

/// Iterate [`cn_step`] for `steps` steps from `z0`.
pub fn cn_run<S: GradientSystem + ?Sized>(
    sys: &S,
    z0: &AugmentedState,
    dt: f64,
    steps: usize,
    pred: Predictor,
    opts: RecordOptions,
) -> Result<RunRecord> {
    if steps == 0 {
        return Err(SavError::Config("steps must be at least 1".into()));
    }
    pred.validate(sys)?;
    let ws = CnWorkspace::new(sys, dt)?;
    let phi1_op = match pred {
        Predictor::HalfStepExponentialEuler => Some(exponential_euler_operator(sys, 0.5 * dt)?),
        _ => None,
    };
    let mut rec = Recorder::new(sys, z0, dt, opts);
    let mut z = z0.clone();
    let mut previous: Option<Vec<f64>> = None;
    for n in 0..steps {
        let next = predict_with(pred, sys, phi1_op.as_ref(), &z, previous.as_deref(), n, dt)
            .and_then(|u_bar| cn_step(sys, &z, &u_bar, &ws))
            .map_err(|e| e.at_step(n))?;
        if !next.is_finite() {
            return Err(SavError::NonFinite.at_step(n));
        }
        previous = Some(std::mem::replace(&mut z, next).u);
        rec.push(n + 1, &z);
    }
    Ok(rec.finish(steps, z))
}
