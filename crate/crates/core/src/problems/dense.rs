use crate::error::{Result, SavError};
use crate::linalg::{DenseOperator, LinearParts};
use crate::sav::{Aux, GradientSystem, Structure};

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A bounded-below energy part `E_X` with its gradient.
pub struct EnergyTerm {
    value: ScalarFn,
    gradient: VectorFn,
}

impl EnergyTerm {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Box::new(value),
            gradient: Box::new(gradient),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |u| vec![0.0; u.len()])
    }
}

/// Gradient system with user-supplied dense `D`, `L` and energy closures.
pub struct DenseGradientSystem {
    parts: LinearParts,
    structure: Structure,
    weight: f64,
    shifts: [f64; 2],
    lower: EnergyTerm,
    upper: EnergyTerm,
}

impl DenseGradientSystem {
    pub fn new(
        d: DenseOperator,
        l: DenseOperator,
        structure: Structure,
        lower: EnergyTerm,
        upper: EnergyTerm,
        shifts: [f64; 2],
    ) -> Result<Self> {
        if d.dim() != l.dim() {
            return Err(SavError::DimensionMismatch {
                expected: d.dim(),
                got: l.dim(),
            });
        }
        Ok(Self {
            parts: LinearParts::Dense { d, l },
            structure,
            weight: 1.0,
            shifts,
            lower,
            upper,
        })
    }

    pub fn with_inner_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    fn term(&self, which: Aux) -> &EnergyTerm {
        match which {
            Aux::Lower => &self.lower,
            Aux::Upper => &self.upper,
        }
    }
}

impl std::fmt::Debug for DenseGradientSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseGradientSystem")
            .field("parts", &self.parts)
            .field("structure", &self.structure)
            .field("weight", &self.weight)
            .field("shifts", &self.shifts)
            .finish_non_exhaustive()
    }
}

impl GradientSystem for DenseGradientSystem {
    fn linear_parts(&self) -> &LinearParts {
        &self.parts
    }

    fn structure(&self) -> Structure {
        self.structure
    }

    fn inner_weight(&self) -> f64 {
        self.weight
    }

    fn shift(&self, which: Aux) -> f64 {
        match which {
            Aux::Lower => self.shifts[0],
            Aux::Upper => self.shifts[1],
        }
    }

    fn energy(&self, which: Aux, u: &[f64]) -> f64 {
        (self.term(which).value)(u)
    }

    fn grad_energy(&self, which: Aux, u: &[f64]) -> Vec<f64> {
        (self.term(which).gradient)(u)
    }
}

#[cfg(test)]
impl DenseGradientSystem {
    /// Random skew `D`, random PSD `L`, constant energies.
    pub(crate) fn random_quadratic_only(n: usize, seed: u64) -> Self {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(seed);
        let a = DenseOperator::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let d = DenseOperator::from_fn(n, |i, j| a[(i, j)] - a[(j, i)]);
        let b = DenseOperator::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let l = b.transpose().matmul(&b);
        Self::new(
            d,
            l,
            Structure::SkewAdjoint,
            EnergyTerm::new(|_| 0.5, |u| vec![0.0; u.len()]),
            EnergyTerm::new(|_| 2.0, |u| vec![0.0; u.len()]),
            [1.0, 1.0],
        )
        .unwrap()
    }
}
