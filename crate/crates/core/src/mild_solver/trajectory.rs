use alloc::vec::Vec;

use crate::aa_signals::{Signal, Span};
use crate::error::{invalid, Error, Result};
use crate::spectral_heat::{BasisShape, Field, SpectralBasis};

/// The first stamp whose sup norm crossed the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    pub time: f64,
    pub sup: f64,
}

/// What happened inside one coarse step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepRecord {
    /// Largest Picard iteration count over the substeps.
    pub iterations: u32,
    /// Largest estimated contraction factor `M·L_R·dt`.
    pub estimated_factor: f64,
    /// Largest observed ratio of successive Picard increments.
    pub observed_ratio: f64,
    /// Number of substeps taken (1 unless the step was refined).
    pub substeps: u32,
}

/// A solved run: coefficients at increasing stamps plus step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    shape: BasisShape,
    stamps: Vec<f64>,
    coeffs: Vec<f64>,
    sup_trace: Vec<f64>,
    steps: Vec<StepRecord>,
    blowup: Option<BlowUp>,
}

impl Trajectory {
    pub(crate) fn with_capacity(shape: BasisShape, stamps: usize) -> Self {
        Self {
            shape,
            stamps: Vec::with_capacity(stamps),
            coeffs: Vec::with_capacity(stamps * shape.modes),
            sup_trace: Vec::with_capacity(stamps),
            steps: Vec::with_capacity(stamps.saturating_sub(1)),
            blowup: None,
        }
    }

    pub(crate) fn push_stamp(&mut self, t: f64, coeffs: &[f64], sup: f64) {
        self.stamps.push(t);
        self.coeffs.extend_from_slice(coeffs);
        self.sup_trace.push(sup);
    }

    pub(crate) fn push_step(&mut self, rec: StepRecord) {
        self.steps.push(rec);
    }

    pub(crate) fn set_blowup(&mut self, b: BlowUp) {
        self.blowup = Some(b);
    }

    /// Rebuilds a trajectory from stored parts, e.g. after reading it back
    /// from disk. The sup trace is recomputed from the coefficients.
    pub fn from_parts(
        basis: &SpectralBasis,
        stamps: Vec<f64>,
        coeffs: Vec<f64>,
        steps: Vec<StepRecord>,
        blowup: Option<BlowUp>,
    ) -> Result<Self> {
        let k = basis.modes();
        if stamps.is_empty() {
            return Err(Error::Empty("trajectory stamps"));
        }
        if coeffs.len() != stamps.len() * k {
            return Err(Error::DimensionMismatch {
                expected: stamps.len() * k,
                found: coeffs.len(),
            });
        }
        if !stamps.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("trajectory stamps must increase strictly"));
        }
        if !steps.is_empty() && steps.len() + 1 != stamps.len() {
            return Err(invalid("one step record per interval is required"));
        }
        let mut grid = alloc::vec![0.0; basis.grid_len()];
        let sup_trace = coeffs
            .chunks(k)
            .map(|c| {
                basis.to_grid_into(c, &mut grid);
                grid.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .collect();
        Ok(Self {
            shape: basis.shape(),
            stamps,
            coeffs,
            sup_trace,
            steps,
            blowup,
        })
    }

    pub fn shape(&self) -> BasisShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.stamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stamps.is_empty()
    }

    pub fn stamps(&self) -> &[f64] {
        &self.stamps
    }

    pub fn start(&self) -> f64 {
        self.stamps[0]
    }

    pub fn end(&self) -> f64 {
        *self.stamps.last().unwrap()
    }

    /// Coefficients at stamp `i`.
    pub fn coeffs(&self, i: usize) -> &[f64] {
        let k = self.shape.modes;
        &self.coeffs[i * k..(i + 1) * k]
    }

    pub fn all_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn field(&self, basis: &SpectralBasis, i: usize) -> Result<Field> {
        self.check_basis(basis)?;
        Field::from_coeffs(basis, self.coeffs(i).to_vec())
    }

    /// Grid sup norm at every stamp.
    pub fn sup_trace(&self) -> &[f64] {
        &self.sup_trace
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// Per-step Picard iteration counts.
    pub fn iterations(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.iterations).collect()
    }

    pub fn blowup(&self) -> Option<BlowUp> {
        self.blowup
    }

    pub fn check_basis(&self, basis: &SpectralBasis) -> Result<()> {
        if basis.shape() != self.shape {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// Index of the stamp equal to `t` up to `1e-9` relative, if any.
    pub fn stamp_index(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * libm::fmax(1.0, libm::fabs(t));
        let i = self.stamps.partition_point(|&s| s < t - tol);
        (i < self.stamps.len() && libm::fabs(self.stamps[i] - t) <= tol).then_some(i)
    }

    /// Coefficients at time `t`, linearly interpolated between stamps.
    pub fn coeffs_at(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (lo, hi) = (self.start(), self.end());
        if !(t >= lo && t <= hi) {
            return Err(Error::SpanViolation { t, lo, hi });
        }
        if let Some(i) = self.stamp_index(t) {
            out.copy_from_slice(self.coeffs(i));
            return Ok(());
        }
        let j = self
            .stamps
            .partition_point(|&s| s <= t)
            .clamp(1, self.len() - 1);
        let (t0, t1) = (self.stamps[j - 1], self.stamps[j]);
        let w = (t - t0) / (t1 - t0);
        for ((o, a), b) in out.iter_mut().zip(self.coeffs(j - 1)).zip(self.coeffs(j)) {
            *o = (1.0 - w) * a + w * b;
        }
        Ok(())
    }

    /// `t ↦ x(t + tau)`: the stamps move by `-tau`.
    pub fn translate(&self, tau: f64) -> Trajectory {
        let mut out = self.clone();
        out.stamps.iter_mut().for_each(|s| *s -= tau);
        if let Some(b) = &mut out.blowup {
            b.time -= tau;
        }
        out
    }

    /// Stamps inside `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Trajectory> {
        let a = self.stamps.partition_point(|&s| s < lo);
        let b = self.stamps.partition_point(|&s| s <= hi);
        if a >= b {
            return Err(Error::Empty("trajectory window"));
        }
        Ok(self.select(&(a..b).collect::<Vec<_>>()))
    }

    /// Every `stride`-th stamp starting at the first.
    pub fn subsample(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        self.select(&(0..self.len()).step_by(stride).collect::<Vec<_>>())
    }

    fn select(&self, idx: &[usize]) -> Trajectory {
        let k = self.shape.modes;
        let mut out = Trajectory::with_capacity(self.shape, idx.len());
        for &i in idx {
            out.push_stamp(self.stamps[i], self.coeffs(i), self.sup_trace[i]);
        }
        // Step records only survive when the selection is contiguous.
        if idx.windows(2).all(|w| w[1] == w[0] + 1) {
            if let (Some(&first), Some(&last)) = (idx.first(), idx.last()) {
                if last <= self.steps.len() {
                    out.steps = self.steps[first..last].to_vec();
                }
            }
        }
        out.blowup = self
            .blowup
            .filter(|b| idx.last().is_some_and(|&l| self.stamps[l] >= b.time));
        debug_assert_eq!(out.coeffs.len(), idx.len() * k);
        out
    }

    /// The trajectory as a grid-valued signal (linear in time between
    /// stamps), defined on `[start, end]`.
    pub fn as_signal<'a>(&'a self, basis: &'a SpectralBasis) -> Result<TrajectorySignal<'a>> {
        self.check_basis(basis)?;
        Ok(TrajectorySignal { traj: self, basis })
    }
}

/// Grid values of a trajectory as a function of time.
pub struct TrajectorySignal<'a> {
    traj: &'a Trajectory,
    basis: &'a SpectralBasis,
}

impl Signal for TrajectorySignal<'_> {
    fn dim(&self) -> usize {
        self.basis.grid_len()
    }

    fn span(&self) -> Span {
        Span::new(self.traj.start(), self.traj.end())
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let mut c = alloc::vec![0.0; self.basis.modes()];
        let t = t.clamp(self.traj.start(), self.traj.end());
        self.traj
            .coeffs_at(t, &mut c)
            .expect("time clamped into the span");
        self.basis.to_grid_into(&c, out);
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        let a = self.traj.stamps.partition_point(|&s| s < lo);
        let b = self.traj.stamps.partition_point(|&s| s <= hi);
        out.extend_from_slice(&self.traj.stamps[a..b]);
    }

    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        let a = self.traj.stamps.partition_point(|&s| s <= lo);
        match self.traj.stamps.get(a) {
            Some(&s) if s < hi => 0.0,
            _ => f64::INFINITY,
        }
    }
}
