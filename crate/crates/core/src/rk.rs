//! Fourth-order linearly implicit SAV scheme from the two-stage Gauss method.
//!
//! The stages solve
//!
//! ```text
//! Zᵢ = zⁿ + Δt Σⱼ aᵢⱼ 𝓛(Ūⱼ) ∇Ẽ(Zⱼ),    zⁿ⁺¹ = zⁿ + Δt Σⱼ bⱼ 𝓛(Ūⱼ) ∇Ẽ(Zⱼ)
//! ```
//!
//! where `Ūⱼ` are explicitly predicted approximations of `u(tₙ + cⱼΔt)`. With
//! `𝓛` frozen the stage equations are linear in `(Z₁, Z₂)`; they are assembled
//! as one dense `2(n+2)` system. Since the Gauss tableau is canonical,
//! `bᵢbⱼ = bᵢaᵢⱼ + bⱼaⱼᵢ`, and `Ẽ` is quadratic, `Ẽ(zⁿ⁺¹) = Ẽ(zⁿ)` for any
//! choice of `Ūⱼ`.
//!
//! Two stage predictors are provided: an explicit five-stage Runge–Kutta
//! method whose stages 4 and 5 are taken as `Ū₁`, `Ū₂`, and a three-stage
//! exponential Runge–Kutta method run to `c₁Δt` and `c₂Δt` for problems with
//! a Fourier-diagonal splitting `u' = Au + g(u)`.

use num_complex::Complex64;

use crate::error::{Result, SavError};
use crate::linalg::{DenseOperator, FourierDiagonalOperator, LuFactors};
use crate::phi::{phi1, phi2};
use crate::record::{RecordOptions, Recorder, RunRecord};
use crate::sav::{grad_modified_energy, original_rhs, AugmentedState, FrozenOperator, GradientSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    /// Two-stage Gauss–Legendre, order 4.
    pub fn gauss2() -> Self {
        let s = 3.0_f64.sqrt() / 6.0;
        Self {
            a: vec![vec![0.25, 0.25 - s], vec![0.25 + s, 0.25]],
            b: vec![0.5, 0.5],
            c: vec![0.5 - s, 0.5 + s],
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `max_{i,j} |bᵢbⱼ − bᵢaᵢⱼ − bⱼaⱼᵢ|`
    pub fn canonical_defect(&self) -> f64 {
        let s = self.stages();
        let mut worst = 0.0_f64;
        for i in 0..s {
            for j in 0..s {
                let d = self.b[i] * self.b[j] - self.b[i] * self.a[i][j] - self.b[j] * self.a[j][i];
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// `max_i |Σⱼ aᵢⱼ − cᵢ|`
    pub fn row_sum_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.c)
            .map(|(row, c)| (row.iter().sum::<f64>() - c).abs())
            .fold(0.0, f64::max)
    }
}

/// Coefficients of the explicit five-stage predictor. Strictly lower
/// triangular; rows 4 and 5 sum to `c₁`, `c₂` of [`ButcherTableau::gauss2`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitPredictorTableau {
    pub abar: [[f64; 5]; 5],
}

impl Default for ExplicitPredictorTableau {
    fn default() -> Self {
        let s = 3.0_f64.sqrt() / 6.0;
        Self {
            abar: [
                [0.0, 0.0, 0.0, 0.0, 0.0],
                [0.25, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.5, 0.0, 0.0, 0.0],
                [1.0 / 6.0, 0.0, 1.0 / 3.0 - s, 0.0, 0.0],
                [1.0 / 6.0, 0.0, 1.0 / 3.0 + s, 0.0, 0.0],
            ],
        }
    }
}

impl ExplicitPredictorTableau {
    pub fn is_strictly_lower(&self) -> bool {
        (0..5).all(|i| (i..5).all(|j| self.abar[i][j] == 0.0))
    }
}

/// Three-stage exponential Runge–Kutta method with `c̃ = (0, 1/3, 2/3)`:
///
/// ```text
/// ã₂₁ = ⅓φ₁(z/3)
/// ã₃₁ = ⅔φ₁(2z/3) − ⁴⁄₃φ₂(2z/3),  ã₃₂ = ⁴⁄₃φ₂(2z/3)
/// b̃₁  = φ₁(z) − ³⁄₂φ₂(z),  b̃₂ = 0,  b̃₃ = ³⁄₂φ₂(z)
/// ```
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpTableau;

impl ExpTableau {
    pub const C: [f64; 3] = [0.0, 1.0 / 3.0, 2.0 / 3.0];

    pub fn a(&self, i: usize, j: usize, z: Complex64) -> Complex64 {
        match (i, j) {
            (1, 0) => phi1(z / 3.0) / 3.0,
            (2, 0) => phi1(2.0 * z / 3.0) * (2.0 / 3.0) - phi2(2.0 * z / 3.0) * (4.0 / 3.0),
            (2, 1) => phi2(2.0 * z / 3.0) * (4.0 / 3.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn b(&self, j: usize, z: Complex64) -> Complex64 {
        match j {
            0 => phi1(z) - phi2(z) * 1.5,
            2 => phi2(z) * 1.5,
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// How `Ū₁`, `Ū₂` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StagePredictor {
    ExplicitFiveStage,
    ExponentialRk,
}

impl StagePredictor {
    pub fn validate<S: GradientSystem + ?Sized>(self, sys: &S) -> Result<()> {
        match self {
            StagePredictor::ExponentialRk if sys.splitting().is_none() => Err(SavError::SplittingUnavailable),
            _ => Ok(()),
        }
    }
}

/// `(Ȳ₄, Ȳ₅)` of the explicit five-stage method.
pub fn predict_stages_explicit<S: GradientSystem + ?Sized>(sys: &S, u: &[f64], dt: f64) -> Result<[Vec<f64>; 2]> {
    let abar = ExplicitPredictorTableau::default().abar;
    let mut stages: Vec<Vec<f64>> = Vec::with_capacity(5);
    let mut slopes: Vec<Vec<f64>> = Vec::with_capacity(5);
    for row in abar.iter() {
        let mut y = u.to_vec();
        for (coef, k) in row.iter().zip(&slopes) {
            if *coef != 0.0 {
                for (yi, ki) in y.iter_mut().zip(k) {
                    *yi += dt * coef * ki;
                }
            }
        }
        slopes.push(original_rhs(sys, &y)?);
        stages.push(y);
    }
    let y5 = stages.pop().unwrap();
    let y4 = stages.pop().unwrap();
    Ok([y4, y5])
}

/// Coefficient operators of one exponential RK step of length `h`.
#[derive(Debug, Clone)]
struct ExpStep {
    h: f64,
    a21: FourierDiagonalOperator,
    a31: FourierDiagonalOperator,
    a32: FourierDiagonalOperator,
    b1: FourierDiagonalOperator,
    b3: FourierDiagonalOperator,
}

impl ExpStep {
    fn new(a: &FourierDiagonalOperator, h: f64) -> Self {
        let t = ExpTableau;
        Self {
            h,
            a21: a.map(|s| t.a(1, 0, h * s)),
            a31: a.map(|s| t.a(2, 0, h * s)),
            a32: a.map(|s| t.a(2, 1, h * s)),
            b1: a.map(|s| t.b(0, h * s)),
            b3: a.map(|s| t.b(2, h * s)),
        }
    }

    fn run<S: GradientSystem + ?Sized>(&self, sys: &S, u: &[f64]) -> Result<Vec<f64>> {
        let split = sys.splitting().ok_or(SavError::SplittingUnavailable)?;
        let au = split.linear().apply(u)?;
        let slope = |v: &[f64]| -> Vec<f64> { split.nonlinear(v).iter().zip(&au).map(|(g, a)| g + a).collect() };
        let h = self.h;
        let combine = |terms: &[(&FourierDiagonalOperator, &Vec<f64>)]| -> Result<Vec<f64>> {
            let mut out = u.to_vec();
            for (op, f) in terms {
                for (o, x) in out.iter_mut().zip(op.apply(f)?) {
                    *o += h * x;
                }
            }
            Ok(out)
        };
        let f1 = slope(u);
        let u2 = combine(&[(&self.a21, &f1)])?;
        let f2 = slope(&u2);
        let u3 = combine(&[(&self.a31, &f1), (&self.a32, &f2)])?;
        let f3 = slope(&u3);
        combine(&[(&self.b1, &f1), (&self.b3, &f3)])
    }
}

/// Cached exponential stage predictor for a fixed `Δt`.
#[derive(Debug, Clone)]
struct ExpStagePlan {
    steps: [ExpStep; 2],
}

impl ExpStagePlan {
    fn new<S: GradientSystem + ?Sized>(sys: &S, dt: f64) -> Result<Self> {
        let split = sys.splitting().ok_or(SavError::SplittingUnavailable)?;
        let c = ButcherTableau::gauss2().c;
        Ok(Self {
            steps: [
                ExpStep::new(split.linear(), c[0] * dt),
                ExpStep::new(split.linear(), c[1] * dt),
            ],
        })
    }

    fn predict<S: GradientSystem + ?Sized>(&self, sys: &S, u: &[f64]) -> Result<[Vec<f64>; 2]> {
        Ok([self.steps[0].run(sys, u)?, self.steps[1].run(sys, u)?])
    }
}

/// One step of the exponential RK method of length `h` from `u`.
pub fn exponential_rk<S: GradientSystem + ?Sized>(sys: &S, u: &[f64], h: f64) -> Result<Vec<f64>> {
    let split = sys.splitting().ok_or(SavError::SplittingUnavailable)?;
    ExpStep::new(split.linear(), h).run(sys, u)
}

/// `(ERK(c₁Δt)u, ERK(c₂Δt)u)`
pub fn predict_stages_exponential<S: GradientSystem + ?Sized>(sys: &S, u: &[f64], dt: f64) -> Result<[Vec<f64>; 2]> {
    ExpStagePlan::new(sys, dt)?.predict(sys, u)
}

/// Dense matrix of `w ↦ 𝓛(ū)∇Ẽ(w)` on the flattened `Z`.
pub fn frozen_matrix<S: GradientSystem + ?Sized>(sys: &S, u_bar: &[f64]) -> Result<DenseOperator> {
    let frozen = FrozenOperator::new(sys, u_bar)?;
    let m = u_bar.len() + 2;
    let mut out = DenseOperator::zeros(m);
    let mut e = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        let w = AugmentedState::from_flat(&e);
        let col = frozen.apply(&grad_modified_energy(sys, &w)?)?.to_flat();
        e[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// One step of the scheme with the given stage predictions.
pub fn rk4_step<S: GradientSystem + ?Sized>(
    sys: &S,
    z: &AugmentedState,
    dt: f64,
    stage_values: [&[f64]; 2],
) -> Result<AugmentedState> {
    let tab = ButcherTableau::gauss2();
    let m = z.dim() + 2;
    let mats = [
        frozen_matrix(sys, stage_values[0])?,
        frozen_matrix(sys, stage_values[1])?,
    ];

    let big = DenseOperator::from_fn(2 * m, |r, c| {
        let (i, p) = (r / m, r % m);
        let (j, q) = (c / m, c % m);
        let id = if r == c { 1.0 } else { 0.0 };
        id - dt * tab.a[i][j] * mats[j][(p, q)]
    });
    let flat = z.to_flat();
    let mut rhs = flat.clone();
    rhs.extend_from_slice(&flat);
    let lu = LuFactors::factor(&big).map_err(|e| match e {
        SavError::SingularMatrix { detail } => SavError::SingularMatrix {
            detail: format!("stage system: {detail}"),
        },
        other => other,
    })?;
    let stages = lu.solve(&rhs)?;

    let mut next = flat;
    for j in 0..2 {
        let k = mats[j].apply(&stages[j * m..(j + 1) * m])?;
        for (x, kj) in next.iter_mut().zip(&k) {
            *x += dt * tab.b[j] * kj;
        }
    }
    Ok(AugmentedState::from_flat(&next))
}

/// Iterate [`rk4_step`] for `steps` steps from `z0`.
pub fn rk4_run<S: GradientSystem + ?Sized>(
    sys: &S,
    z0: &AugmentedState,
    dt: f64,
    steps: usize,
    pred: StagePredictor,
    opts: RecordOptions,
) -> Result<RunRecord> {
    if steps == 0 {
        return Err(SavError::Config("steps must be at least 1".into()));
    }
    pred.validate(sys)?;
    let exp_plan = match pred {
        StagePredictor::ExponentialRk => Some(ExpStagePlan::new(sys, dt)?),
        StagePredictor::ExplicitFiveStage => None,
    };
    let mut rec = Recorder::new(sys, z0, dt, opts);
    let mut z = z0.clone();
    for n in 0..steps {
        let step = || -> Result<AugmentedState> {
            let [u1, u2] = match &exp_plan {
                Some(plan) => plan.predict(sys, &z.u)?,
                None => predict_stages_explicit(sys, &z.u, dt)?,
            };
            let next = rk4_step(sys, &z, dt, [&u1, &u2])?;
            if next.is_finite() {
                Ok(next)
            } else {
                Err(SavError::NonFinite)
            }
        };
        z = step().map_err(|e| e.at_step(n))?;
        rec.push(n + 1, &z);
    }
    Ok(rec.finish(steps, z))
}
