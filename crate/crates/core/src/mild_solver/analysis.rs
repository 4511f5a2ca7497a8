use alloc::vec::Vec;

use super::forcing::ForcingSpec;
use super::stepper::{integrate_panels_into, phi_psi, Problem};
use super::trajectory::Trajectory;
use crate::aa_signals::{conjugate_exponent, stepanov_norm, Signal, Span, StepanovConfig};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{GaussLegendre, PANEL_ORDER};
use crate::spectral_heat::{SemigroupParams, SpectralBasis};

/// `H(t)` as a grid-valued signal.
pub struct ForcingSignal<'a> {
    forcing: &'a ForcingSpec,
    profiles: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl<'a> ForcingSignal<'a> {
    pub fn new(basis: &SpectralBasis, forcing: &'a ForcingSpec) -> Result<Self> {
        Self::with_offset(basis, forcing, alloc::vec![0.0; basis.grid_len()])
    }

    /// `t ↦ offset + H(t)` where `offset` holds grid values.
    pub fn with_offset(
        basis: &SpectralBasis,
        forcing: &'a ForcingSpec,
        offset: Vec<f64>,
    ) -> Result<Self> {
        forcing.check(basis)?;
        if offset.len() != basis.grid_len() {
            return Err(Error::DimensionMismatch {
                expected: basis.grid_len(),
                found: offset.len(),
            });
        }
        let profiles = forcing
            .terms()
            .iter()
            .map(|t| basis.to_grid(&t.profile))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            forcing,
            profiles,
            offset,
        })
    }

    /// `t ↦ G(y) + H(t)`: the right-hand side `f(t, y)` at a frozen state.
    pub fn at_state(problem: &'a Problem, state_coeffs: &[f64]) -> Result<Self> {
        let g = problem.nonlinear_term(state_coeffs);
        let offset = problem.basis.to_grid(&g)?;
        Self::with_offset(&problem.basis, &problem.forcing, offset)
    }
}

impl Signal for ForcingSignal<'_> {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn span(&self) -> Span {
        self.forcing.span()
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.offset);
        let mut s = [0.0];
        for (term, profile) in self.forcing.terms().iter().zip(&self.profiles) {
            term.signal.eval_into(t, &mut s);
            for (o, p) in out.iter_mut().zip(profile) {
                *o += s[0] * p;
            }
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        for term in self.forcing.terms() {
            term.signal.breakpoints(lo, hi, out);
        }
    }

    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        self.forcing.terms().iter().fold(f64::INFINITY, |m, t| {
            libm::fmin(m, t.signal.feature_width(lo, hi))
        })
    }
}

/// Parts of the a-priori bound on a global solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    /// `sup_t ‖u_x(t)‖` of the unforced companion run.
    pub companion_sup: f64,
    /// `‖H‖_{BS^p}` over the scan range.
    pub forcing_norm: f64,
    /// `M e^{3λ₁}/(e^{λ₁} - 1)`.
    pub constant: f64,
    pub bound: f64,
}

/// `sup_t ‖u_x(t)‖ + M e^{3λ₁}(e^{λ₁} - 1)⁻¹ ‖H‖_{BS^p}`.
pub fn global_bound_estimate(
    problem: &Problem,
    companion: &Trajectory,
    cfg: &StepanovConfig,
) -> Result<BoundEstimate> {
    companion.check_basis(&problem.basis)?;
    let params = problem.basis.semigroup_params();
    let companion_sup = companion.sup_trace().iter().fold(0.0f64, |m, &v| m.max(v));
    let forcing_norm = if problem.forcing.is_zero() {
        0.0
    } else {
        stepanov_norm(&ForcingSignal::new(&problem.basis, &problem.forcing)?, cfg)?
    };
    let constant = bound_constant(params);
    Ok(BoundEstimate {
        companion_sup,
        forcing_norm,
        constant,
        bound: companion_sup + constant * forcing_norm,
    })
}

/// `M e^{3λ₁}/(e^{λ₁} - 1)`.
pub fn bound_constant(params: SemigroupParams) -> f64 {
    params.m * libm::exp(3.0 * params.lambda1) / libm::expm1(params.lambda1)
}

/// Result of [`translation_extension`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    pub ladder: Vec<f64>,
    /// `distances[n][m] = sup_{|t| ≤ T_c} ‖u_n(t) - u_m(t)‖`.
    pub distances: Vec<Vec<f64>>,
    /// `defects[n] = distances[n + 1][n]`.
    pub defects: Vec<f64>,
    /// `u_last` on the sampled window.
    pub candidate: Trajectory,
    /// Defect of the last pair: the Cauchy evidence attached to the
    /// candidate.
    pub candidate_defect: f64,
}

/// Forms `u_n(t) = x(t + t_n)` on `[-T_c, T_c]`, sampled every `spacing`.
pub fn translation_extension(
    basis: &SpectralBasis,
    traj: &Trajectory,
    ladder: &[f64],
    half_width: f64,
    spacing: f64,
) -> Result<ExtensionReport> {
    traj.check_basis(basis)?;
    if ladder.len() < 2 {
        return Err(invalid("translation extension needs at least two shifts"));
    }
    if !ladder.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("ladder must increase"));
    }
    if !(half_width >= 0.0) || !(spacing > 0.0) {
        return Err(invalid("window half-width and spacing must be positive"));
    }
    let needed_start = ladder[0] - half_width;
    let needed_end = ladder[ladder.len() - 1] + half_width;
    let tol = 1e-9 * libm::fmax(1.0, libm::fabs(needed_end));
    if needed_start < traj.start() - tol || needed_end > traj.end() + tol {
        return Err(Error::SpanTooShort {
            start: traj.start(),
            end: traj.end(),
            needed_start,
            needed_end,
        });
    }
    let count = libm::ceil(2.0 * half_width / spacing - 1e-9) as usize;
    let times: Vec<f64> = (0..=count)
        .map(|i| libm::fmin(-half_width + spacing * i as f64, half_width))
        .collect();
    let k = basis.modes();
    let clamp = |t: f64| t.clamp(traj.start(), traj.end());
    // samples[n][i·K..] = coefficients of u_n(times[i]).
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(ladder.len());
    for &shift in ladder {
        let mut row = alloc::vec![0.0; times.len() * k];
        for (i, &t) in times.iter().enumerate() {
            traj.coeffs_at(clamp(t + shift), &mut row[i * k..(i + 1) * k])?;
        }
        samples.push(row);
    }
    let n = ladder.len();
    let mut distances = alloc::vec![alloc::vec![0.0; n]; n];
    let mut diff = alloc::vec![0.0; k];
    let mut grid = alloc::vec![0.0; basis.grid_len()];
    for a in 0..n {
        for b in 0..a {
            let mut worst: f64 = 0.0;
            for i in 0..times.len() {
                for ((d, x), y) in diff
                    .iter_mut()
                    .zip(&samples[a][i * k..(i + 1) * k])
                    .zip(&samples[b][i * k..(i + 1) * k])
                {
                    *d = x - y;
                }
                basis.to_grid_into(&diff, &mut grid);
                worst = grid.iter().fold(worst, |m, v| m.max(v.abs()));
            }
            distances[a][b] = worst;
            distances[b][a] = worst;
        }
    }
    let defects: Vec<f64> = (0..n - 1).map(|m| distances[m + 1][m]).collect();
    let last = &samples[n - 1];
    let mut candidate = Trajectory::with_capacity(basis.shape(), times.len());
    for (i, &t) in times.iter().enumerate() {
        let c = &last[i * k..(i + 1) * k];
        basis.to_grid_into(c, &mut grid);
        let sup = grid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        candidate.push_stamp(t, c, sup);
    }
    Ok(ExtensionReport {
        ladder: ladder.to_vec(),
        distances,
        candidate_defect: *defects.last().unwrap(),
        defects,
        candidate,
    })
}

/// Sup norm of `x(t_j) - T(t_j - t_i)x(t_i) - ∫ T(t_j - σ) f(σ, x(σ)) dσ`
/// for stamps `i < j`, with `G` linear between stamps and the forcing
/// integrated afresh on breakpoint-split panels.
pub fn mild_identity_residual(
    problem: &Problem,
    traj: &Trajectory,
    i: usize,
    j: usize,
    max_panels: usize,
) -> Result<f64> {
    traj.check_basis(&problem.basis)?;
    if !(i < j && j < traj.len()) {
        return Err(invalid("need stamp indices i < j inside the trajectory"));
    }
    let basis = &problem.basis;
    let lambdas = basis.eigenvalues();
    let k = basis.modes();
    let lambda_max = lambdas[k - 1];
    let rule = GaussLegendre::new(PANEL_ORDER);
    let mut breaks = Vec::new();
    let mut forced = alloc::vec![0.0; k];
    let mut per_mode = alloc::vec![0.0; k];
    let mut acc = traj.coeffs(i).to_vec();
    let mut g_left = problem.nonlinear_term(traj.coeffs(i));
    for m in i..j {
        let (t0, t1) = (traj.stamps()[m], traj.stamps()[m + 1]);
        let h = t1 - t0;
        let g_right = problem.nonlinear_term(traj.coeffs(m + 1));
        forced.iter_mut().for_each(|v| *v = 0.0);
        for term in problem.forcing.terms() {
            integrate_panels_into(
                &rule,
                &term.signal,
                t0,
                h,
                lambdas,
                lambda_max,
                max_panels,
                &mut breaks,
                &mut per_mode,
            )?;
            for ((f, p), w) in forced.iter_mut().zip(&term.profile).zip(&per_mode) {
                *f += p * w;
            }
        }
        for q in 0..k {
            let z = lambdas[q] * h;
            let (phi, psi) = phi_psi(z);
            acc[q] = libm::exp(-z) * acc[q]
                + h * psi * g_left[q]
                + h * (phi - psi) * g_right[q]
                + forced[q];
        }
        g_left = g_right;
    }
    let diff: Vec<f64> = traj
        .coeffs(j)
        .iter()
        .zip(&acc)
        .map(|(a, b)| a - b)
        .collect();
    let grid = basis.to_grid(&diff)?;
    Ok(grid.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `sup_y ‖T(δ)y - y‖` over the stamps of `traj`.
pub fn semigroup_defect(basis: &SpectralBasis, traj: &Trajectory, delta: f64) -> Result<f64> {
    traj.check_basis(basis)?;
    if delta < 0.0 {
        return Err(Error::NegativeTime(delta));
    }
    let factors: Vec<f64> = basis
        .eigenvalues()
        .iter()
        .map(|l| libm::expm1(-l * delta))
        .collect();
    let mut diff = alloc::vec![0.0; basis.modes()];
    let mut grid = alloc::vec![0.0; basis.grid_len()];
    let mut worst: f64 = 0.0;
    for i in 0..traj.len() {
        for ((d, c), f) in diff.iter_mut().zip(traj.coeffs(i)).zip(&factors) {
            *d = c * f;
        }
        basis.to_grid_into(&diff, &mut grid);
        worst = grid.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Ok(worst)
}

/// Bound on `‖x(t) - x(s)‖` for `|t - s| = δ`:
/// `defect + k_p·M·(δ + 3)^{1/p}·(∫_0^δ e^{-qλ₁σ} dσ)^{1/q}`.
pub fn holder_increment_bound(
    params: SemigroupParams,
    defect: f64,
    k_p: f64,
    p: f64,
    delta: f64,
) -> f64 {
    let q = conjugate_exponent(p);
    let kernel = if q.is_infinite() {
        1.0
    } else {
        let ql = q * params.lambda1;
        libm::pow(-libm::expm1(-ql * delta) / ql, 1.0 / q)
    };
    defect + k_p * params.m * libm::pow(delta + 3.0, 1.0 / p) * kernel
}
