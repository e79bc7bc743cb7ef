//! Exponential-integrator functions `φ₁(z) = (eᶻ − 1)/z` and
//! `φ₂(z) = (eᶻ − 1 − z)/z²`.

use num_complex::Complex64;

/// Below this modulus the truncated Taylor series is used.
pub const TAYLOR_THRESHOLD: f64 = 1e-2;
const TAYLOR_TERMS: usize = 10;

/// `Σ_{k<TERMS} z^k / (k + offset)!`
fn series(z: Complex64, offset: u32) -> Complex64 {
    let mut fact: f64 = (1..=offset).map(f64::from).product();
    let mut term = Complex64::new(1.0 / fact, 0.0);
    let mut sum = term;
    for k in 1..TAYLOR_TERMS {
        fact = (k as u32 + offset) as f64;
        term = term * z / fact;
        sum += term;
    }
    sum
}

/// `eᶻ − 1` without cancellation for small `|z|`.
fn expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin,
        z.re.exp() * z.im.sin(),
    )
}

pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_THRESHOLD {
        series(z, 1)
    } else {
        expm1(z) / z
    }
}

pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_THRESHOLD {
        series(z, 2)
    } else {
        (expm1(z) - z) / (z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn limits_at_zero() {
        assert_eq!(phi1(c(0.0, 0.0)), c(1.0, 0.0));
        assert_eq!(phi2(c(0.0, 0.0)), c(0.5, 0.0));
    }

    #[test]
    fn direct_values() {
        let e = std::f64::consts::E;
        assert!((phi1(c(1.0, 0.0)) - c(e - 1.0, 0.0)).norm() < 1e-15);
        assert!((phi2(c(1.0, 0.0)) - c(e - 2.0, 0.0)).norm() < 1e-15);
        // φ1(iπ) = (−2)/(iπ) = 2i/π
        let v = phi1(c(0.0, std::f64::consts::PI));
        assert!((v - c(0.0, 2.0 / std::f64::consts::PI)).norm() < 1e-15);
    }

    #[test]
    fn branches_agree_near_threshold() {
        for i in 0..=40 {
            let r = TAYLOR_THRESHOLD * (0.9 + 0.2 * i as f64 / 40.0);
            for angle in [0.0, 0.7, std::f64::consts::FRAC_PI_2, 2.5, 3.1] {
                let z = Complex64::from_polar(r, angle);
                let d1 = expm1(z) / z;
                let d2 = (expm1(z) - z) / (z * z);
                assert!((series(z, 1) - d1).norm() <= 1e-13);
                assert!((series(z, 2) - d2).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn recurrence_identity() {
        // φ1(z) = 1 + z φ2(z)
        for z in [c(0.003, 0.001), c(0.5, -0.2), c(-3.0, 7.0), c(0.0, 40.0)] {
            let lhs = phi1(z);
            let rhs = 1.0 + z * phi2(z);
            assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm().max(1.0));
        }
    }
}
