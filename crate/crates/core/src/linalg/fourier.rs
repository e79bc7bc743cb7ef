use num_complex::Complex64;

use super::fft;
use crate::error::{Result, SavError};

/// Real-to-real operator diagonalised by the DFT: `v ↦ F⁻¹ diag(symbol) F v`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierDiagonalOperator {
    symbol: Vec<Complex64>,
}

impl FourierDiagonalOperator {
    /// `symbol.len()` must be a power of two.
    pub fn new(symbol: Vec<Complex64>) -> Self {
        assert!(
            symbol.len().is_power_of_two(),
            "Fourier operator length {} is not a power of two",
            symbol.len()
        );
        Self { symbol }
    }

    pub fn dim(&self) -> usize {
        self.symbol.len()
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Largest violation of `symbol[k] = conj(symbol[(N-k) mod N])`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.symbol.len();
        (0..n)
            .map(|k| (self.symbol[k] - self.symbol[(n - k) % n].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Operator whose symbol is `f` applied entrywise.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            symbol: self.symbol.iter().map(|&s| f(s)).collect(),
        }
    }

    /// Composition `self ∘ other` (symbols multiply).
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            symbol: self.symbol.iter().zip(&other.symbol).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.apply_with_residue(v).map(|(out, _)| out)
    }

    /// Returns the real part and the largest discarded imaginary component.
    pub fn apply_with_residue(&self, v: &[f64]) -> Result<(Vec<f64>, f64)> {
        if v.len() != self.dim() {
            return Err(SavError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft::forward(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.symbol) {
            *b *= s;
        }
        fft::inverse(&mut buf);
        let residue = buf.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
        Ok((buf.into_iter().map(|c| c.re).collect(), residue))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_symbol_gives_zero() {
        let op = FourierDiagonalOperator::new(vec![Complex64::new(0.0, 0.0); 8]);
        let v: Vec<f64> = (0..8).map(|j| j as f64 - 3.0).collect();
        assert!(op.apply(&v).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn unit_symbol_is_identity() {
        let op = FourierDiagonalOperator::new(vec![Complex64::new(1.0, 0.0); 16]);
        let v: Vec<f64> = (0..16).map(|j| (j as f64).sqrt()).collect();
        let w = op.apply(&v).unwrap();
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn asymmetric_symbol_leaves_imaginary_residue() {
        let mut s = vec![Complex64::new(0.0, 0.0); 8];
        s[1] = Complex64::new(1.0, 0.0);
        let op = FourierDiagonalOperator::new(s);
        assert!(op.conjugate_symmetry_defect() > 0.5);
        let v: Vec<f64> = (0..8).map(|j| (j as f64).cos()).collect();
        let (_, residue) = op.apply_with_residue(&v).unwrap();
        assert!(residue > 1e-3);
    }

    #[test]
    fn dimension_checked() {
        let op = FourierDiagonalOperator::new(vec![Complex64::new(1.0, 0.0); 4]);
        assert!(matches!(
            op.apply(&[1.0; 3]),
            Err(SavError::DimensionMismatch { expected: 4, got: 3 })
        ));
    }
}
