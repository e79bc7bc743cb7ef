//! Complete elliptic integral `K(k)` and the Jacobi function `cn(x|k)`.
//!
//! Both use the arithmetic–geometric mean. The modulus convention is `k`
//! (not the parameter `m = k²`), restricted to `0 ≤ k < 1`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Result, SavError};

const MAX_AGM_ITERATIONS: usize = 64;
const AGM_TOL: f64 = 1e-15;

fn check_modulus(k: f64) -> Result<()> {
    if (0.0..1.0).contains(&k) {
        Ok(())
    } else {
        Err(SavError::OutOfDomain(format!(
            "elliptic modulus k = {k} outside [0, 1)"
        )))
    }
}

/// `K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ) = π / (2·AGM(1, √(1−k²)))`
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    let mut a = 1.0_f64;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..MAX_AGM_ITERATIONS {
        if (a - b).abs() <= AGM_TOL * a {
            return Ok(FRAC_PI_2 / a);
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Err(SavError::NoConvergence {
        what: "AGM for K(k)",
        iterations: MAX_AGM_ITERATIONS,
    })
}

/// `(sn, cn, dn)` of `x` with modulus `k`, by descending Landen transformation.
pub(crate) fn jacobi_sn_cn_dn(x: f64, k: f64) -> Result<(f64, f64, f64)> {
    check_modulus(k)?;
    if k == 0.0 {
        return Ok((x.sin(), x.cos(), 1.0));
    }
    let mut a = vec![1.0_f64];
    let mut c = vec![k];
    let mut b = (1.0 - k * k).sqrt();
    let mut converged = false;
    for _ in 0..MAX_AGM_ITERATIONS {
        let an = *a.last().unwrap();
        let cn = *c.last().unwrap();
        if cn.abs() <= AGM_TOL * an {
            converged = true;
            break;
        }
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    if !converged {
        return Err(SavError::NoConvergence {
            what: "AGM for Jacobi amplitude",
            iterations: MAX_AGM_ITERATIONS,
        });
    }
    let levels = a.len() - 1;
    let mut amp = (1u64 << levels) as f64 * a[levels] * x;
    let mut prev = amp;
    for n in (1..=levels).rev() {
        prev = amp;
        amp = 0.5 * (amp + (c[n] / a[n] * amp.sin()).asin());
    }
    let sn = amp.sin();
    let cn = amp.cos();
    let dn = if levels == 0 { 1.0 } else { cn / (prev - amp).cos() };
    Ok((sn, cn, dn))
}

/// Jacobi elliptic cosine `cn(x|k)`.
pub fn jacobi_cn(x: f64, k: f64) -> Result<f64> {
    jacobi_sn_cn_dn(x, k).map(|(_, cn, _)| cn.clamp(-1.0, 1.0))
}
