//! Property tests for the structural invariants of the schemes.

mod common;

use common::*;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use savflow::cn::{cn_step, CnWorkspace};
use savflow::rk::{frozen_matrix, rk4_step};
use savflow::sav::{init_augmented, modified_energy, z_inner, AugmentedState, FrozenOperator};

fn random_state(rng: &mut StdRng, n: usize) -> AugmentedState {
    AugmentedState::new(
        random_vec(rng, n, 1.0),
        rng.random_range(0.5..2.0),
        rng.random_range(0.5..2.0),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cn_step_matches_monolithic(seed in any::<u64>(), n in 1usize..=8, dt in 1e-3f64..0.5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n, false);
        let z = random_state(&mut rng, n);
        let ub = random_vec(&mut rng, n, 1.0);
        let fast = cn_step(&sys, &z, &ub, &CnWorkspace::new(&sys, dt).unwrap()).unwrap();
        prop_assert!(rel_diff(&fast, &monolithic_cn(&sys, &z, &ub, dt)) <= 1e-11);
    }

    #[test]
    fn frozen_operator_matches_block_matrix(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n, false);
        let ub = random_vec(&mut rng, n, 1.0);
        let a = frozen_matrix(&sys, &ub).unwrap();
        let b = block_matrix(&sys, &ub);
        prop_assert!(max_diff(a.as_slice(), b.as_slice()) <= 1e-12 * b.max_abs().max(1.0));
    }

    #[test]
    fn frozen_operator_is_skew_or_dissipative(seed in any::<u64>(), n in 1usize..=8, dissipative in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n, dissipative);
        let ub = random_vec(&mut rng, n, 1.0);
        let w = random_state(&mut rng, n);
        let lw = FrozenOperator::new(&sys, &ub).unwrap().apply(&w).unwrap();
        let q = z_inner(&sys, &w, &lw);
        let scale = z_inner(&sys, &w, &w);
        if dissipative {
            prop_assert!(q <= 1e-12 * scale);
        } else {
            prop_assert!(q.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn both_schemes_conserve_for_any_prediction(seed in any::<u64>(), n in 1usize..=8, dt in 1e-3f64..0.5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n, false);
        let z = init_augmented(&sys, &random_vec(&mut rng, n, 1.0)).unwrap();
        let e0 = modified_energy(&sys, &z);
        let [a, b, c] = [0; 3].map(|_| random_vec(&mut rng, n, 1.0));
        let cn = cn_step(&sys, &z, &a, &CnWorkspace::new(&sys, dt).unwrap()).unwrap();
        let rk = rk4_step(&sys, &z, dt, [&b, &c]).unwrap();
        let tol = 1e-10 * e0.abs().max(1.0);
        prop_assert!((modified_energy(&sys, &cn) - e0).abs() <= tol);
        prop_assert!((modified_energy(&sys, &rk) - e0).abs() <= tol);
    }

    #[test]
    fn dissipative_schemes_never_increase(seed in any::<u64>(), n in 1usize..=8, dt in 1e-3f64..0.5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n, true);
        let z = init_augmented(&sys, &random_vec(&mut rng, n, 1.0)).unwrap();
        let e0 = modified_energy(&sys, &z);
        let [a, b, c] = [0; 3].map(|_| random_vec(&mut rng, n, 1.0));
        let cn = cn_step(&sys, &z, &a, &CnWorkspace::new(&sys, dt).unwrap()).unwrap();
        let rk = rk4_step(&sys, &z, dt, [&b, &c]).unwrap();
        let tol = 1e-12 * e0.abs().max(1.0);
        prop_assert!(modified_energy(&sys, &cn) <= e0 + tol);
        prop_assert!(modified_energy(&sys, &rk) <= e0 + tol);
    }
}
