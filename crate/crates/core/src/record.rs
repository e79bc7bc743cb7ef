//! Time series produced by the stepping loops.

use crate::linalg::max_abs;
use crate::sav::{modified_energy, original_energy, AugmentedState, GradientSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordOptions {
    /// Keep every `stride`-th step (step 0 is always kept).
    pub stride: usize,
    /// Store the state vector in each kept row.
    pub snapshots: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub step: usize,
    pub t: f64,
    pub modified_energy: f64,
    pub original_energy: f64,
    pub state: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dt: f64,
    pub steps: usize,
    pub rows: Vec<RunRow>,
    pub initial: AugmentedState,
    pub last: AugmentedState,
    /// `max_n |Ẽⁿ − Ẽ⁰| / |Ẽ⁰|` over all steps, not only recorded ones.
    pub max_rel_err_modified: f64,
    /// `max_n |Eⁿ − E⁰| / |E⁰|` over all steps.
    pub max_rel_err_original: f64,
}

impl RunRecord {
    pub fn modified_energy0(&self) -> f64 {
        self.rows[0].modified_energy
    }

    pub fn original_energy0(&self) -> f64 {
        self.rows[0].original_energy
    }

    /// `‖u^N − u⁰‖_∞ / ‖u⁰‖_∞`, the closure error for periodic solutions.
    pub fn closure_error(&self) -> f64 {
        let diff: Vec<f64> = self.last.u.iter().zip(&self.initial.u).map(|(a, b)| a - b).collect();
        max_abs(&diff) / max_abs(&self.initial.u)
    }

    /// `‖u^N − reference‖_∞ / ‖reference‖_∞`
    pub fn error_against(&self, reference: &[f64]) -> f64 {
        let diff: Vec<f64> = self.last.u.iter().zip(reference).map(|(a, b)| a - b).collect();
        max_abs(&diff) / max_abs(reference)
    }
}

fn rel(value: f64, base: f64) -> f64 {
    if base == 0.0 {
        (value - base).abs()
    } else {
        ((value - base) / base).abs()
    }
}

pub(crate) struct Recorder<'a, S: GradientSystem + ?Sized> {
    sys: &'a S,
    dt: f64,
    opts: RecordOptions,
    rows: Vec<RunRow>,
    initial: AugmentedState,
    e_mod0: f64,
    e_orig0: f64,
    max_mod: f64,
    max_orig: f64,
}

impl<'a, S: GradientSystem + ?Sized> Recorder<'a, S> {
    pub(crate) fn new(sys: &'a S, z0: &AugmentedState, dt: f64, opts: RecordOptions) -> Self {
        let e_mod0 = modified_energy(sys, z0);
        let e_orig0 = original_energy(sys, &z0.u);
        let mut rec = Self {
            sys,
            dt,
            opts: RecordOptions {
                stride: opts.stride.max(1),
                ..opts
            },
            rows: Vec::new(),
            initial: z0.clone(),
            e_mod0,
            e_orig0,
            max_mod: 0.0,
            max_orig: 0.0,
        };
        rec.rows.push(rec.row(0, z0, e_mod0, e_orig0));
        rec
    }

    fn row(&self, step: usize, z: &AugmentedState, e_mod: f64, e_orig: f64) -> RunRow {
        RunRow {
            step,
            t: step as f64 * self.dt,
            modified_energy: e_mod,
            original_energy: e_orig,
            state: self.opts.snapshots.then(|| z.u.clone()),
        }
    }

    pub(crate) fn push(&mut self, step: usize, z: &AugmentedState) {
        let e_mod = modified_energy(self.sys, z);
        let e_orig = original_energy(self.sys, &z.u);
        self.max_mod = self.max_mod.max(rel(e_mod, self.e_mod0));
        self.max_orig = self.max_orig.max(rel(e_orig, self.e_orig0));
        if step.is_multiple_of(self.opts.stride) {
            let row = self.row(step, z, e_mod, e_orig);
            self.rows.push(row);
        }
    }

    pub(crate) fn finish(self, steps: usize, last: AugmentedState) -> RunRecord {
        RunRecord {
            dt: self.dt,
            steps,
            rows: self.rows,
            initial: self.initial,
            last,
            max_rel_err_modified: self.max_mod,
            max_rel_err_original: self.max_orig,
        }
    }
}
