//! Runs and diagnostics shared by the command line and the acceptance suite.

use std::path::Path;
use std::time::Instant;

use aalab_core::aa_signals::{uniform_continuity_modulus, ModulusRow, StepanovConfig};
use aalab_core::compactness_lab::{
    energy_monotonicity_check, minimal_solution_select, range_compactness_report,
    state_stepanov_bound, CompactnessReport, CompactnessVerdict, EnergyReport, Functional, Metric,
    SubvariantReport,
};
use aalab_core::mild_solver::{
    global_bound_estimate, holder_increment_bound, semigroup_defect, solve, BoundEstimate,
    ForcingSpec, Problem, Trajectory,
};
use aalab_core::spectral_heat::{Field, SpectralBasis};
use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::io::{fmt15, write_trajectory, BlowUpRecord, RunManifest, Table, Verdict, Versions};

/// Profile of the second initial field of two-run experiments:
/// `-0.3 sin πξ + 0.1 sin 2πξ`.
pub const SECOND_INITIAL_PROFILE: &str = "modes:-0.3,0.1";

/// A solved scenario.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: ScenarioConfig,
    pub basis: SpectralBasis,
    pub problem: Problem,
    pub x0: Field,
    pub trajectory: Trajectory,
    pub wall_clock_seconds: f64,
}

pub fn run(cfg: &ScenarioConfig) -> Result<Run> {
    let start = Instant::now();
    let basis = cfg.basis()?;
    let problem = cfg.problem(&basis)?;
    let x0 = cfg.initial_field(&basis)?;
    let trajectory =
        solve(&problem, &x0, &cfg.solver_config()?).map_err(|e| anyhow!("solve: {e}"))?;
    Ok(Run {
        config: cfg.clone(),
        basis,
        problem,
        x0,
        trajectory,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Solves every scenario on the rayon pool; results keep the input order.
pub fn run_all(cfgs: &[ScenarioConfig]) -> Result<Vec<Run>> {
    cfgs.par_iter().map(run).collect()
}

/// `cfg` started from [`SECOND_INITIAL_PROFILE`].
pub fn second_initial(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.name = format!("{}-second", cfg.name);
    c.initial.profile = SECOND_INITIAL_PROFILE.into();
    c.initial.amplitude = 1.0;
    c
}

/// The unforced run from the same initial field.
pub fn companion(run: &Run) -> Result<Trajectory> {
    let p = Problem::new(
        run.basis.clone(),
        run.problem.nonlinearity,
        ForcingSpec::none(),
    )
    .map_err(|e| anyhow!("{e}"))?;
    solve(&p, &run.x0, &run.config.solver_config()?).map_err(|e| anyhow!("companion solve: {e}"))
}

pub fn blowup_verdict(traj: &Trajectory) -> Verdict {
    match traj.blowup() {
        None => Verdict::new(true, format!("bounded up to t = {}", fmt15(traj.end()))),
        Some(b) => Verdict::new(
            false,
            format!("blow-up at t = {} with sup {}", fmt15(b.time), fmt15(b.sup)),
        ),
    }
}

/// Every step's observed Picard ratio is at most its estimated factor.
pub fn contraction_verdict(traj: &Trajectory) -> Verdict {
    let worst = traj
        .steps()
        .iter()
        .enumerate()
        .find(|(_, s)| s.observed_ratio > s.estimated_factor);
    let max_factor = traj
        .steps()
        .iter()
        .fold(0.0f64, |m, s| m.max(s.estimated_factor));
    match worst {
        None => Verdict::new(
            true,
            format!(
                "observed ratios within estimates; largest factor {}",
                fmt15(max_factor)
            ),
        ),
        Some((i, s)) => Verdict::new(
            false,
            format!(
                "step {i}: observed ratio {} exceeds estimate {}",
                fmt15(s.observed_ratio),
                fmt15(s.estimated_factor)
            ),
        ),
    }
}

/// Sup-norm trace against `sup‖u_x‖ + M e^{3λ₁}(e^{λ₁} - 1)⁻¹ ‖H‖_{BS^p}`.
pub fn bound_check(run: &Run) -> Result<(BoundEstimate, Verdict)> {
    let comp = companion(run)?;
    let end = (run.trajectory.end() - 1.0).max(0.0);
    let cfg =
        StepanovConfig::new(run.config.diagnostics.p, 0.0, end).map_err(|e| anyhow!("{e}"))?;
    let est = global_bound_estimate(&run.problem, &comp, &cfg).map_err(|e| anyhow!("{e}"))?;
    let peak = run
        .trajectory
        .sup_trace()
        .iter()
        .fold(0.0f64, |m, &v| m.max(v));
    let pass = run.trajectory.blowup().is_none()
        && run.trajectory.sup_trace().iter().all(|&s| s <= est.bound);
    let detail = format!("max sup {} against bound {}", fmt15(peak), fmt15(est.bound));
    Ok((est, Verdict::new(pass, detail)))
}

pub fn compactness_check(
    basis: &SpectralBasis,
    traj: &Trajectory,
    cfg: &ScenarioConfig,
) -> Result<(CompactnessReport, Verdict)> {
    let d = &cfg.diagnostics;
    let report = range_compactness_report(basis, traj, &d.eps, &d.strides, d.t0, cfg.metric()?)
        .map_err(|e| anyhow!("{e}"))?;
    let n = report.covers.len();
    let pass = report.verdict == CompactnessVerdict::CompactnessConsistent;
    let detail = format!(
        "counts {:?} at stride {} vs {:?} at stride {}",
        report.covers[n - 2].counts,
        report.strides[n - 2],
        report.covers[n - 1].counts,
        report.strides[n - 1]
    );
    Ok((report, Verdict::new(pass, detail)))
}

pub fn compactness_table(report: &CompactnessReport) -> Table {
    let mut t = Table::new(&["stride", "eps", "count"]);
    for (stride, cover) in report.strides.iter().zip(&report.covers) {
        for (e, c) in cover.eps.iter().zip(&cover.counts) {
            t.push(vec![stride.to_string(), fmt15(*e), c.to_string()]);
        }
    }
    t
}

fn stamp_spacing(traj: &Trajectory) -> Result<f64> {
    match traj.stamps() {
        [a, b, ..] => Ok(b - a),
        _ => bail!("trajectory has fewer than two stamps"),
    }
}

/// `ω(δ)` of the trajectory, sampled at the stamp gap or half the finest δ.
pub fn modulus_table(
    basis: &SpectralBasis,
    traj: &Trajectory,
    deltas: &[f64],
) -> Result<Vec<ModulusRow>> {
    let finest = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let spacing = stamp_spacing(traj)?.min(0.5 * finest);
    let signal = traj.as_signal(basis).map_err(|e| anyhow!("{e}"))?;
    uniform_continuity_modulus(&signal, deltas, (traj.start(), traj.end()), spacing)
        .map_err(|e| anyhow!("{e}"))
}

pub fn modulus_verdict(rows: &[ModulusRow]) -> Verdict {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let monotone = sorted.windows(2).all(|w| w[1].omega >= w[0].omega);
    let finite = sorted.iter().all(|r| r.omega.is_finite());
    let smallest = sorted.first().map_or(f64::NAN, |r| r.omega);
    let detail = format!(
        "ω {} in δ; ω({}) = {}",
        if monotone {
            "nondecreasing"
        } else {
            "not monotone"
        },
        fmt15(sorted.first().map_or(f64::NAN, |r| r.delta)),
        fmt15(smallest)
    );
    Verdict::new(monotone && finite, detail)
}

pub fn modulus_csv(rows: &[ModulusRow]) -> Table {
    let mut t = Table::new(&["delta", "omega"]);
    for r in rows {
        t.push(vec![fmt15(r.delta), fmt15(r.omega)]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderRow {
    pub delta: f64,
    pub omega: f64,
    pub defect: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    pub p: f64,
    /// `max_x ‖G(x) + H‖_{BS^p}` over the state cloud.
    pub k_p: f64,
    pub rows: Vec<HolderRow>,
}

/// Sampled increments `ω(δ)` against the Hölder bound built from `k_p`.
pub fn holder_check(run: &Run, deltas: &[f64]) -> Result<(HolderReport, Verdict)> {
    let d = &run.config.diagnostics;
    let traj = &run.trajectory;
    let end = (traj.end() - 1.0).max(traj.start());
    let cfg = StepanovConfig::new(d.holder_p, traj.start(), end).map_err(|e| anyhow!("{e}"))?;
    let cloud = traj.subsample(d.cloud_stride);
    let k_p = state_stepanov_bound(&run.problem, &cloud, &cfg)
        .map_err(|e| anyhow!("{e}"))?
        .k_p;
    let params = run.basis.semigroup_params();
    let omegas = modulus_table(&run.basis, traj, deltas)?;
    let rows = omegas
        .par_iter()
        .map(|r| {
            let defect = semigroup_defect(&run.basis, traj, r.delta).map_err(|e| anyhow!("{e}"))?;
            Ok(HolderRow {
                delta: r.delta,
                omega: r.omega,
                defect,
                bound: holder_increment_bound(params, defect, k_p, d.holder_p, r.delta),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violation = rows.iter().find(|r| r.omega > r.bound);
    let verdict = match violation {
        None => Verdict::new(
            true,
            format!(
                "k_{} = {}; every increment within its bound",
                d.holder_p,
                fmt15(k_p)
            ),
        ),
        Some(r) => Verdict::new(
            false,
            format!(
                "δ = {}: ω {} exceeds {}",
                fmt15(r.delta),
                fmt15(r.omega),
                fmt15(r.bound)
            ),
        ),
    };
    Ok((
        HolderReport {
            p: d.holder_p,
            k_p,
            rows,
        },
        verdict,
    ))
}

pub fn energy_check(
    u: &Trajectory,
    v: &Trajectory,
    tolerance: f64,
) -> Result<(EnergyReport, Verdict)> {
    let report = energy_monotonicity_check(u, v, tolerance).map_err(|e| anyhow!("{e}"))?;
    let detail = format!(
        "largest forward difference {} against budget {}",
        fmt15(report.trace.max_jump),
        fmt15(tolerance)
    );
    let verdict = Verdict::new(report.pass, detail);
    Ok((report, verdict))
}

pub fn energy_table(report: &EnergyReport) -> Table {
    let mut t = Table::new(&["t", "energy"]);
    for (s, e) in report.trace.stamps.iter().zip(&report.trace.values) {
        t.push(vec![fmt15(*s), fmt15(*e)]);
    }
    t
}

/// Minimal candidate under `functional`. With two or more candidates the
/// verdict passes when the parallelogram gap of the best two is within
/// tolerance, i.e. the minimal solution is numerically unique.
pub fn subvariant_check(
    basis: &SpectralBasis,
    candidates: &[Trajectory],
    functional: Functional<'_>,
    gap_tolerance: f64,
) -> Result<(SubvariantReport, Verdict)> {
    let r = minimal_solution_select(basis, candidates, functional, gap_tolerance)
        .map_err(|e| anyhow!("{e}"))?;
    let verdict = match r.gap {
        None if candidates.len() > 1 => Verdict::new(false, "candidates share no stamps"),
        None => Verdict::new(
            true,
            format!(
                "single candidate, {} = {}",
                r.functional,
                fmt15(r.values[0])
            ),
        ),
        Some(gap) => Verdict::new(
            r.indistinguishable,
            format!(
                "argmin {} (ties {:?}); gap {} against tolerance {}",
                r.argmin,
                r.ties,
                fmt15(gap),
                fmt15(gap_tolerance)
            ),
        ),
    };
    Ok((r, verdict))
}

pub fn subvariant_table(report: &SubvariantReport) -> Table {
    let mut t = Table::new(&["candidate", "value", "minimal"]);
    for (i, v) in report.values.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            fmt15(*v),
            report.ties.contains(&i).to_string(),
        ]);
    }
    t
}

/// Sup norm of `u - v` over the stamps in `[lo, hi]` the two share.
pub fn sup_distance(
    basis: &SpectralBasis,
    u: &Trajectory,
    v: &Trajectory,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut diff = vec![0.0; basis.modes()];
    for (i, &t) in u.stamps().iter().enumerate() {
        if t < lo || t > hi {
            continue;
        }
        let Some(j) = v.stamp_index(t) else { continue };
        for ((d, a), b) in diff.iter_mut().zip(u.coeffs(i)).zip(v.coeffs(j)) {
            *d = a - b;
        }
        let grid = basis.to_grid(&diff).map_err(|e| anyhow!("{e}"))?;
        worst = grid.iter().fold(worst, |m, x| m.max(x.abs()));
    }
    Ok(worst)
}

/// Solves `cfg`, writes the trajectory directory and its manifest.
pub fn simulate(cfg: &ScenarioConfig, dir: &Path) -> Result<(Run, RunManifest)> {
    let run = run(cfg)?;
    let traj = &run.trajectory;
    write_trajectory(dir, &run.basis, traj, cfg.output.snapshot_every)?;
    let mut verdicts = std::collections::BTreeMap::new();
    verdicts.insert("blowup".to_string(), blowup_verdict(traj));
    verdicts.insert("contraction".to_string(), contraction_verdict(traj));
    if traj.blowup().is_none() {
        let (_, v) = bound_check(&run)?;
        verdicts.insert("global_bound".to_string(), v);
    }
    let manifest = RunManifest {
        name: cfg.name.clone(),
        config: cfg.to_toml(),
        versions: Versions::default(),
        wall_clock_seconds: run.wall_clock_seconds,
        stamps: traj.len(),
        blowup: traj.blowup().map(|b| BlowUpRecord {
            time: b.time,
            sup: b.sup,
        }),
        verdicts,
    };
    manifest.write(dir)?;
    Ok((run, manifest))
}

/// Resolves a metric id for callers that bypass the config.
pub fn metric(id: &str) -> Result<Metric> {
    Metric::from_id(id).ok_or_else(|| anyhow!("unknown metric `{id}`"))
}
