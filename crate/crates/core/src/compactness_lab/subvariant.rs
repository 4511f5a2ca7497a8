use alloc::string::String;
use alloc::vec::Vec;

use super::energy::energy_of_coeffs;
use crate::aa_signals::{stepanov_norm, Signal, StepanovConfig, TranslationTestReport};
use crate::error::{Error, Result};
use crate::mild_solver::{ForcingSignal, Problem, Trajectory};
use crate::spectral_heat::SpectralBasis;

/// Pointwise functional `Φ` of a subvariant functional `λ(x) = sup_t Φ(x(t))`.
#[derive(Clone, Copy)]
pub enum Functional<'a> {
    /// `Φ(y) = ‖y‖_∞` on the grid.
    SupNorm,
    /// `Φ(y) = E(y)`.
    EnergySup,
    /// `Φ` applied to grid values.
    Custom(&'a str, &'a dyn Fn(&[f64]) -> f64),
}

impl core::fmt::Debug for Functional<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.id())
    }
}

impl Functional<'_> {
    pub fn id(&self) -> &str {
        match self {
            Functional::SupNorm => "sup-norm",
            Functional::EnergySup => "energy-sup",
            Functional::Custom(id, _) => id,
        }
    }

    pub fn from_id(id: &str) -> Option<Functional<'static>> {
        match id {
            "sup-norm" => Some(Functional::SupNorm),
            "energy-sup" => Some(Functional::EnergySup),
            _ => None,
        }
    }

    fn at(&self, traj: &Trajectory, basis: &SpectralBasis, i: usize, grid: &mut [f64]) -> f64 {
        match self {
            Functional::SupNorm => traj.sup_trace()[i],
            Functional::EnergySup => energy_of_coeffs(traj.coeffs(i)),
            Functional::Custom(_, phi) => {
                basis.to_grid_into(traj.coeffs(i), grid);
                phi(grid)
            }
        }
    }
}

/// `sup_t Φ(x(t))` over every stamp.
pub fn subvariant_eval(
    basis: &SpectralBasis,
    traj: &Trajectory,
    functional: Functional<'_>,
) -> Result<f64> {
    subvariant_eval_window(basis, traj, functional, f64::NEG_INFINITY, f64::INFINITY)
}

/// `sup Φ(x(t))` over the stamps in `[lo, hi]`.
pub fn subvariant_eval_window(
    basis: &SpectralBasis,
    traj: &Trajectory,
    functional: Functional<'_>,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    traj.check_basis(basis)?;
    let mut grid = alloc::vec![0.0; basis.grid_len()];
    let a = traj.stamps().partition_point(|&s| s < lo);
    let b = traj.stamps().partition_point(|&s| s <= hi);
    if a >= b {
        return Err(Error::Empty("stamps in the evaluation window"));
    }
    Ok((a..b).fold(f64::NEG_INFINITY, |m, i| {
        m.max(functional.at(traj, basis, i, &mut grid))
    }))
}

/// Outcome of [`minimal_solution_select`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubvariantReport {
    pub functional: String,
    pub values: Vec<f64>,
    /// Lowest value; ties go to the lowest index.
    pub argmin: usize,
    /// Every index whose value ties the minimum.
    pub ties: Vec<usize>,
    /// `inf_t 4·[½E(u) + ½E(v) - E(½u + ½v)]` for the two best candidates on
    /// their shared stamps, when there are two candidates sharing stamps.
    pub gap: Option<f64>,
    pub gap_tolerance: f64,
    /// The gap is at most the tolerance.
    pub indistinguishable: bool,
}

/// Relative tolerance under which two subvariant values tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Picks the candidate minimising the subvariant functional and measures
/// the parallelogram gap between the two best.
pub fn minimal_solution_select(
    basis: &SpectralBasis,
    candidates: &[Trajectory],
    functional: Functional<'_>,
    gap_tolerance: f64,
) -> Result<SubvariantReport> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate list"));
    }
    let values = candidates
        .iter()
        .map(|c| subvariant_eval(basis, c, functional))
        .collect::<Result<Vec<_>>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = |v: f64| libm::fabs(v - min) <= TIE_TOLERANCE * libm::fmax(1.0, libm::fabs(min));
    let ties: Vec<usize> = (0..values.len()).filter(|&i| tie(values[i])).collect();
    let argmin = ties[0];
    let runner_up = (0..values.len())
        .filter(|&i| i != argmin)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let gap = match runner_up {
        Some(j) => parallelogram_gap(&candidates[argmin], &candidates[j]),
        None => None,
    };
    Ok(SubvariantReport {
        functional: functional.id().into(),
        values,
        argmin,
        ties,
        indistinguishable: gap.is_some_and(|g| g <= gap_tolerance),
        gap,
        gap_tolerance,
    })
}

/// `inf_t 4·[½E(u) + ½E(v) - E(½(u + v))]` over stamps the two share.
pub fn parallelogram_gap(u: &Trajectory, v: &Trajectory) -> Option<f64> {
    if u.shape() != v.shape() {
        return None;
    }
    let mut best: Option<f64> = None;
    for (i, &t) in u.stamps().iter().enumerate() {
        let Some(j) = v.stamp_index(t) else { continue };
        let (a, b) = (u.coeffs(i), v.coeffs(j));
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let c =
            4.0 * (0.5 * energy_of_coeffs(a) + 0.5 * energy_of_coeffs(b) - energy_of_coeffs(&mid));
        best = Some(best.map_or(c, |m: f64| m.min(c)));
    }
    best
}

/// Largest Stepanov norm over a family of signals, with the index attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepanovBound {
    pub k_p: f64,
    pub argmax: usize,
}

/// `k_p = max_i ‖f(·, x_i)‖_{BS^p}` where `make(i)` builds `t ↦ f(t, x_i)`.
pub fn uniform_stepanov_bound<S, F>(
    count: usize,
    mut make: F,
    cfg: &StepanovConfig,
) -> Result<StepanovBound>
where
    S: Signal,
    F: FnMut(usize) -> Result<S>,
{
    if count == 0 {
        return Err(Error::Empty("point cloud"));
    }
    let mut best = StepanovBound {
        k_p: f64::NEG_INFINITY,
        argmax: 0,
    };
    for i in 0..count {
        let norm = stepanov_norm(&make(i)?, cfg)?;
        if norm > best.k_p {
            best = StepanovBound {
                k_p: norm,
                argmax: i,
            };
        }
    }
    Ok(best)
}

/// [`uniform_stepanov_bound`] for `f(t, y) = G(y) + H(t)` over the stamps of
/// `cloud`.
pub fn state_stepanov_bound(
    problem: &Problem,
    cloud: &Trajectory,
    cfg: &StepanovConfig,
) -> Result<StepanovBound> {
    cloud.check_basis(&problem.basis)?;
    uniform_stepanov_bound(
        cloud.len(),
        |i| ForcingSignal::at_state(problem, cloud.coeffs(i)),
        cfg,
    )
}

/// Stepanov norm of the limit candidate of a translation test, if it has one.
pub fn limit_stepanov_bound(report: &TranslationTestReport, p: f64) -> Result<Option<f64>> {
    let Some(limit) = &report.limit_candidate else {
        return Ok(None);
    };
    let span = limit.span();
    let cfg = StepanovConfig::new(p, span.lo, span.hi - 1.0)?;
    stepanov_norm(limit, &cfg).map(Some)
}
