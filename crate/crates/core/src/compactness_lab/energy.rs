use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mild_solver::{Problem, Trajectory};
use crate::spectral_heat::{Field, SpectralBasis};

/// `E(x) = ½ ∫ |x(ξ)|² dξ` by the trapezoidal rule on the grid.
pub fn energy(x: &Field) -> f64 {
    let shape = x.shape();
    let h = shape.length / shape.intervals as f64;
    let g = x.grid();
    let n = g.len();
    let inner: f64 = g[1..n - 1].iter().map(|v| v * v).sum();
    0.5 * h * (inner + 0.5 * (g[0] * g[0] + g[n - 1] * g[n - 1]))
}

/// `½ Σ c_k²`. Equal to [`energy`] of the synthesized field, since the
/// trapezoidal rule is exact on products of the retained modes.
pub fn energy_of_coeffs(coeffs: &[f64]) -> f64 {
    0.5 * coeffs.iter().map(|c| c * c).sum::<f64>()
}

/// `t ↦ E(u(t) - v(t))` on shared stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    pub stamps: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest forward difference `E(t_{i+1}) - E(t_i)`, or 0.
    pub max_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub trace: EnergyTrace,
    pub tolerance: f64,
    /// Every forward difference is at most `tolerance`.
    pub pass: bool,
}

pub(crate) fn check_stamps(u: &Trajectory, v: &Trajectory) -> Result<()> {
    if u.shape() != v.shape() {
        return Err(Error::BasisMismatch);
    }
    if u.len() != v.len() {
        return Err(Error::StampMismatch);
    }
    for (a, b) in u.stamps().iter().zip(v.stamps()) {
        if libm::fabs(a - b) > 1e-12 * libm::fmax(1.0, libm::fabs(*a)) {
            return Err(Error::StampMismatch);
        }
    }
    Ok(())
}

/// The energy of the difference of two trajectories.
pub fn difference_energy(u: &Trajectory, v: &Trajectory) -> Result<EnergyTrace> {
    check_stamps(u, v)?;
    let values: Vec<f64> = (0..u.len())
        .map(|i| {
            0.5 * u
                .coeffs(i)
                .iter()
                .zip(v.coeffs(i))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .collect();
    let max_jump = values.windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    Ok(EnergyTrace {
        stamps: u.stamps().to_vec(),
        values,
        max_jump,
    })
}

/// Checks that `E(u - v)` never grows by more than `tolerance` per stamp.
pub fn energy_monotonicity_check(
    u: &Trajectory,
    v: &Trajectory,
    tolerance: f64,
) -> Result<EnergyReport> {
    let trace = difference_energy(u, v)?;
    let pass = trace.max_jump <= tolerance;
    Ok(EnergyReport {
        trace,
        tolerance,
        pass,
    })
}

/// Outcome of [`constant_energy_offset_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetReport {
    /// Time average of `u(t) - v(t)`.
    pub w0: Field,
    /// `max_t ‖(u - v)(t) - w₀‖`.
    pub deviation: f64,
    /// `max_t ‖G(u(t)) - G(v(t)) + λ₁ w₀‖`.
    pub g_residual: f64,
}

/// For a pair whose difference energy is constant, recovers the constant
/// offset `w₀` and measures how well `G(u) - G(v) = -λ₁ w₀` holds.
pub fn constant_energy_offset_check(
    problem: &Problem,
    u: &Trajectory,
    v: &Trajectory,
    tolerance: f64,
) -> Result<OffsetReport> {
    u.check_basis(&problem.basis)?;
    let trace = difference_energy(u, v)?;
    let mean = trace.values.iter().sum::<f64>() / trace.values.len() as f64;
    let deviation = trace
        .values
        .iter()
        .fold(0.0f64, |m, e| m.max(libm::fabs(e - mean)));
    if deviation > tolerance {
        return Err(Error::EnergyNotConstant {
            deviation,
            tolerance,
        });
    }
    let basis = &problem.basis;
    let k = basis.modes();
    let n = u.len() as f64;
    let mut w0 = alloc::vec![0.0; k];
    for i in 0..u.len() {
        for ((w, a), b) in w0.iter_mut().zip(u.coeffs(i)).zip(v.coeffs(i)) {
            *w += (a - b) / n;
        }
    }
    let lambda1 = basis.lambda1();
    let mut diff = alloc::vec![0.0; k];
    let mut grid = alloc::vec![0.0; basis.grid_len()];
    let mut dev: f64 = 0.0;
    let mut resid: f64 = 0.0;
    for i in 0..u.len() {
        let (a, b) = (u.coeffs(i), v.coeffs(i));
        for q in 0..k {
            diff[q] = a[q] - b[q] - w0[q];
        }
        dev = dev.max(sup(basis, &diff, &mut grid));
        let (ga, gb) = (problem.nonlinear_term(a), problem.nonlinear_term(b));
        for q in 0..k {
            diff[q] = ga[q] - gb[q] + lambda1 * w0[q];
        }
        resid = resid.max(sup(basis, &diff, &mut grid));
    }
    Ok(OffsetReport {
        w0: Field::from_coeffs(basis, w0)?,
        deviation: dev,
        g_residual: resid,
    })
}

fn sup(basis: &SpectralBasis, coeffs: &[f64], grid: &mut [f64]) -> f64 {
    basis.to_grid_into(coeffs, grid);
    grid.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}
