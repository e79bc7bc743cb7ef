//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{rngs::StdRng, Rng};
use savflow::linalg::{solve_dense, DenseOperator};
use savflow::problems::{DenseGradientSystem, EnergyTerm};
use savflow::rk::ButcherTableau;
use savflow::sav::{augmented_rhs, phi, AugmentedState, Aux, GradientSystem, Structure};

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn rel_diff(a: &AugmentedState, b: &AugmentedState) -> f64 {
    max_diff(&a.to_flat(), &b.to_flat()) / max_abs(&b.to_flat())
}

pub fn random_vec(rng: &mut StdRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
}

/// Dense matrix of `z ↦ 𝓛(ū)∇Ẽ(z)` assembled from its blocks:
///
/// ```text
/// [ DL          2Dφ_L          −2Dφ_U        ]
/// [ φ_Lᵀ W DL   2⟨φ_L, Dφ_L⟩   −2⟨φ_L, Dφ_U⟩ ]
/// [ φ_Uᵀ W DL   2⟨φ_U, Dφ_L⟩   −2⟨φ_U, Dφ_U⟩ ]
/// ```
pub fn block_matrix<S: GradientSystem>(sys: &S, u_bar: &[f64]) -> DenseOperator {
    let n = sys.dim();
    let w = sys.inner_weight();
    let d = DenseOperator::from_linear_map(n, |v| sys.apply_d(v).unwrap());
    let l = DenseOperator::from_linear_map(n, |v| sys.apply_l(v).unwrap());
    let dl = d.matmul(&l);
    let pl = phi(sys, u_bar, Aux::Lower).unwrap();
    let pu = phi(sys, u_bar, Aux::Upper).unwrap();
    let dpl = d.apply(&pl).unwrap();
    let dpu = d.apply(&pu).unwrap();
    let dot = |a: &[f64], b: &[f64]| w * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    DenseOperator::from_fn(n + 2, |i, j| {
        let row_phi = match i {
            i if i == n => Some(&pl),
            i if i == n + 1 => Some(&pu),
            _ => None,
        };
        // column j of the u̇ block
        let col = |k: usize| -> f64 {
            if j < n {
                dl[(k, j)]
            } else if j == n {
                2.0 * dpl[k]
            } else {
                -2.0 * dpu[k]
            }
        };
        match row_phi {
            None => col(i),
            Some(p) => {
                let c: Vec<f64> = (0..n).map(col).collect();
                dot(p, &c)
            }
        }
    })
}

/// Crank–Nicolson step as one dense solve:
/// `(I − Δt/2 M) zⁿ⁺¹ = (I + Δt/2 M) zⁿ` with `M` from [`block_matrix`].
pub fn monolithic_cn<S: GradientSystem>(sys: &S, z: &AugmentedState, u_bar: &[f64], dt: f64) -> AugmentedState {
    let m = block_matrix(sys, u_bar);
    let k = m.dim();
    let lhs = DenseOperator::from_fn(k, |i, j| f64::from(u8::from(i == j)) - 0.5 * dt * m[(i, j)]);
    let mz = m.apply(&z.to_flat()).unwrap();
    let rhs: Vec<f64> = z.to_flat().iter().zip(&mz).map(|(a, b)| a + 0.5 * dt * b).collect();
    AugmentedState::from_flat(&solve_dense(&lhs, &rhs).unwrap())
}

/// Fully implicit two-stage Gauss step on `z' = 𝓛(u)∇Ẽ(z)` by fixed-point
/// iteration. Returns the step and the converged stage `u`-components.
pub fn nonlinear_gauss2<S: GradientSystem>(sys: &S, z: &AugmentedState, dt: f64) -> (AugmentedState, [Vec<f64>; 2]) {
    let t = ButcherTableau::gauss2();
    let rhs = |s: &AugmentedState| augmented_rhs(sys, s, &s.u).unwrap();
    let mut st = [z.clone(), z.clone()];
    for _ in 0..500 {
        let f = [rhs(&st[0]), rhs(&st[1])];
        let next = [0, 1].map(|i| z.add_scaled(dt * t.a[i][0], &f[0]).add_scaled(dt * t.a[i][1], &f[1]));
        let change = (0..2)
            .map(|i| max_diff(&next[i].to_flat(), &st[i].to_flat()))
            .fold(0.0, f64::max);
        st = next;
        if change <= 1e-16 * max_abs(&z.to_flat()) {
            break;
        }
    }
    let f = [rhs(&st[0]), rhs(&st[1])];
    let out = z.add_scaled(dt * t.b[0], &f[0]).add_scaled(dt * t.b[1], &f[1]);
    let [a, b] = st;
    (out, [a.u, b.u])
}

/// Random system of size `n`: skew (or `−I`) `D`, PSD `L`, quartic `E_L`,
/// bounded trigonometric `E_U`, random inner-product weight.
pub fn random_system(rng: &mut StdRng, n: usize, dissipative: bool) -> DenseGradientSystem {
    let a = DenseOperator::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let d = if dissipative {
        DenseOperator::diagonal(&vec![-1.0; n])
    } else {
        DenseOperator::from_fn(n, |i, j| a[(i, j)] - a[(j, i)])
    };
    let b = DenseOperator::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let l = b.transpose().matmul(&b);
    let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let weight = rng.random_range(0.2..2.0);
    let (a1, a2) = (alpha.clone(), alpha);
    let (b1, b2) = (beta.clone(), beta);
    // E = weight·Σ…, so the gradient w.r.t. the weighted inner product has no weight.
    let lower = EnergyTerm::new(
        move |u| u.iter().zip(&a1).map(|(x, c)| 0.25 * c * x.powi(4)).sum::<f64>() * weight,
        move |u| u.iter().zip(&a2).map(|(x, c)| c * x.powi(3)).collect(),
    );
    let upper = EnergyTerm::new(
        move |u| u.iter().zip(&b1).map(|(x, c)| c * (1.0 - x.cos())).sum::<f64>() * weight,
        move |u| u.iter().zip(&b2).map(|(x, c)| c * x.sin()).collect(),
    );
    let structure = if dissipative {
        Structure::NegativeSemidefinite
    } else {
        Structure::SkewAdjoint
    };
    DenseGradientSystem::new(d, l, structure, lower, upper, [1.0, 0.5])
        .unwrap()
        .with_inner_weight(weight)
}
