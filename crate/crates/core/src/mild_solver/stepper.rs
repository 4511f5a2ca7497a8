use alloc::vec::Vec;

use super::forcing::ForcingSpec;
use super::nonlinearity::{flush_subnormal, NonlinearitySpec};
use super::trajectory::{BlowUp, StepRecord, Trajectory};
use crate::aa_signals::Signal;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{panel_edges, GaussLegendre, PANEL_ORDER};
use crate::spectral_heat::{Field, SpectralBasis};

/// Gauss nodes per step on which smooth forcing is interpolated.
pub const SMOOTH_NODES: usize = 8;

/// Increments below `NOISE_FLOOR·R` are rounding noise and do not enter the
/// observed contraction ratio.
const NOISE_FLOOR: f64 = 1e-13;

/// The equation `x' = Ax + G(x) + H(t)` on a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub basis: SpectralBasis,
    pub nonlinearity: NonlinearitySpec,
    pub forcing: ForcingSpec,
}

impl Problem {
    pub fn new(
        basis: SpectralBasis,
        nonlinearity: NonlinearitySpec,
        forcing: ForcingSpec,
    ) -> Result<Self> {
        forcing.check(&basis)?;
        Ok(Self {
            basis,
            nonlinearity,
            forcing,
        })
    }

    /// `G(x)` in coefficients.
    pub fn nonlinear_term(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut grid = alloc::vec![0.0; self.basis.grid_len()];
        let mut out = alloc::vec![0.0; self.basis.modes()];
        self.basis.to_grid_into(coeffs, &mut grid);
        self.nonlinearity.apply(&self.basis, &mut grid, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepScheme {
    /// Exponential Euler: `G` frozen at the left end of the step.
    Frozen,
    /// Fixed-point iteration of the one-step mild map with `G` interpolated
    /// linearly between the step ends.
    #[default]
    Picard,
}

impl StepScheme {
    pub fn id(self) -> &'static str {
        match self {
            StepScheme::Frozen => "frozen",
            StepScheme::Picard => "picard",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "frozen" => Some(StepScheme::Frozen),
            "picard" => Some(StepScheme::Picard),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Sup-norm distance between successive Picard iterates that ends the
    /// iteration.
    pub tolerance: f64,
    pub max_iterations: u32,
    /// Most quadrature panels one step may use for non-smooth forcing.
    pub max_panels: usize,
    /// Sup-norm level that counts as blow-up.
    pub blowup_cap: f64,
    pub scheme: StepScheme,
    /// Deepest dyadic refinement of a step that fails to contract.
    pub max_substep_depth: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 1.0,
            tolerance: 1e-12,
            max_iterations: 50,
            max_panels: 4096,
            blowup_cap: 1e6,
            scheme: StepScheme::Picard,
            max_substep_depth: 48,
        }
    }
}

impl SolverConfig {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            dt,
            horizon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt must be positive"));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(invalid("horizon must be nonnegative"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("Picard tolerance must be positive"));
        }
        if !(self.blowup_cap > 0.0) {
            return Err(invalid("blow-up cap must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("at least one Picard iteration is required"));
        }
        if self.max_panels == 0 {
            return Err(invalid("panel cap must be positive"));
        }
        Ok(())
    }

    /// Number of steps of size `dt` covering the horizon.
    pub fn steps(&self) -> usize {
        libm::ceil(self.horizon / self.dt - 1e-9).max(0.0) as usize
    }
}

/// `φ₁(z) = (1 - e^{-z})/z` and `ψ(z) = (1 - e^{-z} - z e^{-z})/z²`.
pub(crate) fn phi_psi(z: f64) -> (f64, f64) {
    if z < 0.2 {
        let (mut phi, mut psi) = (0.0, 0.0);
        let mut pow = 1.0;
        let mut fact = 1.0; // (n+1)!
        for n in 0..18 {
            let n1 = n as f64 + 1.0;
            fact *= n1;
            phi += pow / fact;
            psi += pow * n1 / (fact * (n1 + 1.0));
            pow *= -z;
        }
        (phi, psi)
    } else {
        let em = -libm::expm1(-z);
        (em / z, (em - z * libm::exp(-z)) / (z * z))
    }
}

/// Per-mode weights for one step length.
#[derive(Debug, Clone)]
struct StepWeights {
    dt: f64,
    decay: Vec<f64>,
    /// Weight of `G` at the left end of the step.
    a0: Vec<f64>,
    /// Weight of `G` at the right end of the step.
    a1: Vec<f64>,
    /// Offsets of the interpolation nodes inside the step.
    offsets: [f64; SMOOTH_NODES],
    /// `smooth[k·8 + j] = ∫_0^dt e^{-λ_k(dt-r)} ℓ_j(r) dr` for the Lagrange
    /// basis `ℓ_j` on `offsets`.
    smooth: Vec<f64>,
}

impl StepWeights {
    fn new(basis: &SpectralBasis, dt: f64, rule: &GaussLegendre) -> Self {
        let lambdas = basis.eigenvalues();
        let node_rule = GaussLegendre::new(SMOOTH_NODES);
        let mut offsets = [0.0; SMOOTH_NODES];
        for (o, x) in offsets.iter_mut().zip(node_rule.nodes()) {
            *o = 0.5 * dt * (1.0 + x);
        }
        let mut decay = Vec::with_capacity(lambdas.len());
        let mut a0 = Vec::with_capacity(lambdas.len());
        let mut a1 = Vec::with_capacity(lambdas.len());
        let mut smooth = alloc::vec![0.0; lambdas.len() * SMOOTH_NODES];
        for (k, &lambda) in lambdas.iter().enumerate() {
            let z = lambda * dt;
            let (phi, psi) = phi_psi(z);
            decay.push(libm::exp(-z));
            a0.push(dt * psi);
            a1.push(dt * (phi - psi));
            let panels = (libm::ceil(z) as usize).max(4);
            let row = &mut smooth[k * SMOOTH_NODES..(k + 1) * SMOOTH_NODES];
            for p in 0..panels {
                let lo = dt * p as f64 / panels as f64;
                let hi = dt * (p + 1) as f64 / panels as f64;
                rule.for_each_node(lo, hi, |r, w| {
                    let kernel = w * libm::exp(-lambda * (dt - r));
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot += kernel * lagrange(&offsets, j, r);
                    }
                });
            }
        }
        Self {
            dt,
            decay,
            a0,
            a1,
            offsets,
            smooth,
        }
    }
}

fn lagrange(nodes: &[f64; SMOOTH_NODES], j: usize, r: f64) -> f64 {
    let mut acc = 1.0;
    for (m, &x) in nodes.iter().enumerate() {
        if m != j {
            acc *= (r - x) / (nodes[j] - x);
        }
    }
    acc
}

/// Outcome of one Picard step.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardStep {
    pub coeffs: Vec<f64>,
    pub iterations: u32,
    /// `M·L_R·dt` with `R` the largest sup norm met during the iteration.
    pub estimated_factor: f64,
    /// Largest ratio of successive increments above the noise floor.
    pub observed_ratio: f64,
    /// Sup-norm distances between successive iterates.
    pub increments: Vec<f64>,
}

/// Steps the mild map. Holds the per-`dt` weights and scratch buffers.
pub struct Stepper<'a> {
    problem: &'a Problem,
    cfg: SolverConfig,
    rule: GaussLegendre,
    weights: Vec<StepWeights>,
    grid: Vec<f64>,
    grid_prev: Vec<f64>,
    g0: Vec<f64>,
    g1: Vec<f64>,
    forcing: Vec<f64>,
    breaks: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a Problem, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let n1 = problem.basis.grid_len();
        let k = problem.basis.modes();
        Ok(Self {
            problem,
            cfg,
            rule: GaussLegendre::new(PANEL_ORDER),
            weights: Vec::new(),
            grid: alloc::vec![0.0; n1],
            grid_prev: alloc::vec![0.0; n1],
            g0: alloc::vec![0.0; k],
            g1: alloc::vec![0.0; k],
            forcing: alloc::vec![0.0; k],
            breaks: Vec::new(),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn weights_index(&mut self, dt: f64) -> usize {
        if let Some(i) = self.weights.iter().position(|w| w.dt == dt) {
            return i;
        }
        let w = StepWeights::new(&self.problem.basis, dt, &self.rule);
        self.weights.push(w);
        self.weights.len() - 1
    }

    fn check_dt(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0) || dt > self.cfg.dt * (1.0 + 1e-12) {
            return Err(invalid("step length must lie in (0, dt]"));
        }
        Ok(())
    }

    /// `∫_0^dt e^{-λ_k(dt-r)} H(t + r) dr` into `self.forcing`.
    fn forcing_integral(&mut self, t: f64, dt: f64, wi: usize) -> Result<()> {
        let k = self.problem.basis.modes();
        self.forcing.iter_mut().for_each(|v| *v = 0.0);
        let lambda_max = self.problem.basis.eigenvalues()[k - 1];
        for term in self.problem.forcing.terms() {
            let sig = &term.signal;
            let mut per_mode = alloc::vec![0.0; k];
            let mut s = [0.0];
            if sig.feature_width(t, t + dt) >= 8.0 * dt {
                let w = &self.weights[wi];
                let mut values = [0.0; SMOOTH_NODES];
                for (v, &o) in values.iter_mut().zip(&w.offsets) {
                    sig.eval_into(t + o, &mut s);
                    *v = s[0];
                }
                for (m, slot) in per_mode.iter_mut().enumerate() {
                    let row = &w.smooth[m * SMOOTH_NODES..(m + 1) * SMOOTH_NODES];
                    *slot = row.iter().zip(&values).map(|(a, b)| a * b).sum();
                }
            } else {
                integrate_panels_into(
                    &self.rule,
                    sig,
                    t,
                    dt,
                    self.problem.basis.eigenvalues(),
                    lambda_max,
                    self.cfg.max_panels,
                    &mut self.breaks,
                    &mut per_mode,
                )?;
            }
            for ((f, p), w) in self.forcing.iter_mut().zip(&term.profile).zip(&per_mode) {
                *f += p * w;
            }
        }
        Ok(())
    }

    /// `G(coeffs)` into `out`, leaving the grid of `coeffs` in `self.grid`.
    fn eval_g(&mut self, coeffs: &[f64], into_g1: bool) -> f64 {
        let basis = &self.problem.basis;
        basis.to_grid_into(coeffs, &mut self.grid);
        let sup = self.grid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.grid_prev.copy_from_slice(&self.grid);
        let out = if into_g1 { &mut self.g1 } else { &mut self.g0 };
        self.problem.nonlinearity.apply(basis, &mut self.grid, out);
        sup
    }

    /// One exponential-Euler step from `x` (coefficients) at time `t`.
    pub fn step_frozen_coeffs(&mut self, x: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
        self.check_dt(dt)?;
        let wi = self.weights_index(dt);
        self.forcing_integral(t, dt, wi)?;
        self.eval_g(x, false);
        let w = &self.weights[wi];
        Ok((0..x.len())
            .map(|k| w.decay[k] * x[k] + (w.a0[k] + w.a1[k]) * self.g0[k] + self.forcing[k])
            .collect())
    }

    /// One Picard-converged step from `x` (coefficients) at time `t`.
    pub fn step_picard_coeffs(&mut self, x: &[f64], t: f64, dt: f64) -> Result<PicardStep> {
        self.check_dt(dt)?;
        let wi = self.weights_index(dt);
        self.forcing_integral(t, dt, wi)?;
        let mut radius = self.eval_g(x, false);
        let m = self.problem.basis.semigroup_params().m;
        let nl = self.problem.nonlinearity;
        let k = x.len();
        let base: Vec<f64> = {
            let w = &self.weights[wi];
            (0..k)
                .map(|i| {
                    flush_subnormal(w.decay[i] * x[i] + w.a0[i] * self.g0[i] + self.forcing[i])
                })
                .collect()
        };
        let factor_at = |r: f64| m * nl.lipschitz(r) * dt;
        let mut factor = factor_at(radius);
        if factor >= 0.5 {
            return Err(Error::NonContraction { factor, dt, radius });
        }
        // First iterate: G frozen at x.
        self.g1.copy_from_slice(&self.g0);
        let mut prev_grid = self.grid_prev.clone();
        let mut y: Vec<f64>;
        let mut increments = Vec::new();
        let mut observed: f64 = 0.0;
        let zero_g = nl.is_zero();
        for it in 1..=self.cfg.max_iterations {
            {
                let w = &self.weights[wi];
                y = (0..k)
                    .map(|i| flush_subnormal(base[i] + w.a1[i] * self.g1[i]))
                    .collect();
            }
            let sup = self.eval_g(&y, true);
            radius = radius.max(sup);
            factor = factor.max(factor_at(radius));
            let inc = self
                .grid_prev
                .iter()
                .zip(&prev_grid)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            if let Some(&last) = increments.last() {
                let floor = NOISE_FLOOR * radius;
                if last > floor && inc > floor {
                    observed = observed.max(inc / last);
                }
            }
            increments.push(inc);
            if !sup.is_finite() {
                return Err(Error::NonContraction {
                    factor: f64::INFINITY,
                    dt,
                    radius: sup,
                });
            }
            if factor >= 0.5 {
                return Err(Error::NonContraction { factor, dt, radius });
            }
            // Iterate `it` is y; one more application confirms it unless G
            // vanishes, in which case the map is constant.
            if zero_g || (it > 1 && inc < self.cfg.tolerance) {
                let iterations = if zero_g { 1 } else { it - 1 };
                return Ok(PicardStep {
                    coeffs: y,
                    iterations,
                    estimated_factor: factor,
                    observed_ratio: observed,
                    increments,
                });
            }
            prev_grid.copy_from_slice(&self.grid_prev);
        }
        Err(Error::PicardStalled {
            iterations: self.cfg.max_iterations,
            increment: increments.last().copied().unwrap_or(f64::NAN),
        })
    }

    /// `T(dt)x + ∫ T(t+dt-s) f(s, x̂(s)) ds` with `x̂` frozen at `x`.
    pub fn step_exponential(&mut self, x: &Field, t: f64, dt: f64) -> Result<Field> {
        x.check_basis(&self.problem.basis)?;
        let y = self.step_frozen_coeffs(x.coeffs(), t, dt)?;
        Field::from_coeffs(&self.problem.basis, y)
    }

    /// Iterates the one-step mild map to the tolerance.
    pub fn step_picard(&mut self, x: &Field, t: f64, dt: f64) -> Result<(Field, u32)> {
        x.check_basis(&self.problem.basis)?;
        let s = self.step_picard_coeffs(x.coeffs(), t, dt)?;
        Ok((
            Field::from_coeffs(&self.problem.basis, s.coeffs)?,
            s.iterations,
        ))
    }

    fn sup_of(&mut self, coeffs: &[f64]) -> f64 {
        self.problem.basis.to_grid_into(coeffs, &mut self.grid);
        self.grid.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Advances over `[t, t + dt]`, halving the step while the mild map
    /// fails to contract.
    fn advance(
        &mut self,
        x: &[f64],
        t: f64,
        dt: f64,
        depth: u32,
        rec: &mut StepRecord,
    ) -> Result<Advance> {
        let attempt = match self.cfg.scheme {
            StepScheme::Frozen => self.step_frozen_coeffs(x, t, dt).map(|c| PicardStep {
                coeffs: c,
                iterations: 1,
                estimated_factor: 0.0,
                observed_ratio: 0.0,
                increments: Vec::new(),
            }),
            StepScheme::Picard => self.step_picard_coeffs(x, t, dt),
        };
        match attempt {
            Ok(step) => {
                rec.iterations = rec.iterations.max(step.iterations);
                rec.estimated_factor = rec.estimated_factor.max(step.estimated_factor);
                rec.observed_ratio = rec.observed_ratio.max(step.observed_ratio);
                rec.substeps += 1;
                let sup = self.sup_of(&step.coeffs);
                if !(sup <= self.cfg.blowup_cap) {
                    return Ok(Advance::BlowUp(BlowUp { time: t + dt, sup }, step.coeffs));
                }
                Ok(Advance::Done(step.coeffs))
            }
            Err(Error::NonContraction { .. } | Error::PicardStalled { .. })
                if depth < self.cfg.max_substep_depth =>
            {
                let half = 0.5 * dt;
                match self.advance(x, t, half, depth + 1, rec)? {
                    Advance::Done(mid) => self.advance(&mid, t + half, half, depth + 1, rec),
                    blown => Ok(blown),
                }
            }
            Err(e) => Err(e),
        }
    }
}

enum Advance {
    Done(Vec<f64>),
    BlowUp(BlowUp, Vec<f64>),
}

/// `∫_0^dt e^{-λ_k(dt-r)} s(t + r) dr` for every mode on panels split at the
/// breakpoints of `s` and short enough that `λ_max·len ≤ 1`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_panels_into(
    rule: &GaussLegendre,
    sig: &dyn Signal,
    t: f64,
    dt: f64,
    lambdas: &[f64],
    lambda_max: f64,
    max_panels: usize,
    breaks: &mut Vec<f64>,
    out: &mut [f64],
) -> Result<()> {
    breaks.clear();
    sig.breakpoints(t, t + dt, breaks);
    let edges = panel_edges(t, t + dt, 1, breaks);
    let mut total = 0usize;
    for pair in edges.windows(2) {
        total += (libm::ceil(lambda_max * (pair[1] - pair[0])) as usize).max(1);
        if total > max_panels {
            return Err(Error::SubdivisionOverflow {
                panels: total,
                cap: max_panels,
            });
        }
    }
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut s = [0.0];
    for pair in edges.windows(2) {
        let pieces = (libm::ceil(lambda_max * (pair[1] - pair[0])) as usize).max(1);
        let len = (pair[1] - pair[0]) / pieces as f64;
        for p in 0..pieces {
            let lo = pair[0] + len * p as f64;
            let hi = if p + 1 == pieces { pair[1] } else { lo + len };
            rule.for_each_node(lo, hi, |u, w| {
                sig.eval_into(u, &mut s);
                let ws = w * s[0];
                let lag = t + dt - u;
                for (o, &l) in out.iter_mut().zip(lambdas) {
                    *o += ws * libm::exp(-l * lag);
                }
            });
        }
    }
    Ok(())
}

/// Marches `[0, T]` from `x₀`.
///
/// Stamps are `i·dt`. Steps whose mild map does not contract are refined
/// dyadically; the record of a coarse step keeps the largest iteration count
/// and contraction figures of its substeps. The run stops at the first
/// substep whose sup norm exceeds the cap, which becomes the last stamp.
pub fn solve(problem: &Problem, x0: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    x0.check_basis(&problem.basis)?;
    let mut stepper = Stepper::new(problem, *cfg)?;
    let steps = cfg.steps();
    problem.forcing.span().require(0.0, steps as f64 * cfg.dt)?;
    let k = problem.basis.modes();
    let mut traj = Trajectory::with_capacity(problem.basis.shape(), steps + 1);
    let mut x = x0.coeffs().to_vec();
    let sup0 = stepper.sup_of(&x);
    traj.push_stamp(0.0, &x, sup0);
    if !(sup0 <= cfg.blowup_cap) {
        traj.set_blowup(BlowUp {
            time: 0.0,
            sup: sup0,
        });
        return Ok(traj);
    }
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        let mut rec = StepRecord::default();
        match stepper.advance(&x, t, cfg.dt, 0, &mut rec)? {
            Advance::Done(y) => {
                let sup = stepper.sup_of(&y);
                traj.push_step(rec);
                traj.push_stamp((i + 1) as f64 * cfg.dt, &y, sup);
                x = y;
            }
            Advance::BlowUp(b, y) => {
                traj.push_step(rec);
                traj.push_stamp(b.time, &y, b.sup);
                traj.set_blowup(b);
                return Ok(traj);
            }
        }
        debug_assert_eq!(x.len(), k);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_psi_series_meets_closed_form() {
        for z in [0.15, 0.19, 0.2, 0.21, 0.3] {
            let em = -libm::expm1(-z);
            let (phi, psi) = phi_psi(z);
            assert!((phi - em / z).abs() < 1e-14);
            assert!((psi - (em - z * libm::exp(-z)) / (z * z)).abs() < 1e-13);
        }
        let (phi, psi) = phi_psi(0.0);
        assert_eq!((phi, psi), (1.0, 0.5));
    }

    #[test]
    fn smooth_weights_integrate_the_kernel() {
        let basis = crate::spectral_heat::assemble_basis(1.0, 64, 256).unwrap();
        let rule = GaussLegendre::new(PANEL_ORDER);
        let w = StepWeights::new(&basis, 1e-3, &rule);
        for (k, &l) in basis.eigenvalues().iter().enumerate() {
            let row: f64 = w.smooth[k * SMOOTH_NODES..(k + 1) * SMOOTH_NODES]
                .iter()
                .sum();
            let exact = -libm::expm1(-l * 1e-3) / l;
            assert!((row - exact).abs() <= 1e-13 * exact, "mode {k}");
            assert!((w.a0[k] + w.a1[k] - exact).abs() <= 1e-14 * exact);
        }
    }
}
