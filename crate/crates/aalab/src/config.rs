//! Scenario configuration.
//!
//! A config is a TOML document with one table per block:
//!
//! ```toml
//! name = "paper-sec4"
//!
//! [basis]
//! length = 1.0
//! modes = 64
//! intervals = 256
//!
//! [solver]
//! dt = 1e-3
//! horizon = 50.0
//!
//! [nonlinearity]
//! id = "cubic"
//!
//! [forcing]
//! signal = "reference"
//! profile = "sin:1"
//! boundary_mode = "profiled"
//!
//! [initial]
//! profile = "sin:1"
//! amplitude = 0.5
//! ```
//!
//! Every key has a default (the reference scenario), unknown keys are
//! rejected, and any key can be overridden from the environment as
//! `AALAB_<SECTION>__<KEY>`, e.g. `AALAB_SOLVER__DT=5e-4`.

use std::path::Path;

use aalab_core::aa_signals::{BumpShape, BumpSpec, UnboundedAASpec};
use aalab_core::compactness_lab::{Functional, Metric};
use aalab_core::mild_solver::{
    BoundaryMode, ForcingSpec, NonlinearitySpec, Problem, SolverConfig, StepScheme,
};
use aalab_core::spectral_heat::{assemble_basis, Field, SpectralBasis};
use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::registry;

/// Prefix of environment overrides.
pub const ENV_PREFIX: &str = "AALAB_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    pub basis: BasisBlock,
    pub solver: SolverBlock,
    pub nonlinearity: NonlinearityBlock,
    pub forcing: ForcingBlock,
    pub initial: InitialBlock,
    pub diagnostics: DiagnosticsBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisBlock {
    pub length: f64,
    pub modes: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub dt: f64,
    pub horizon: f64,
    pub tolerance: f64,
    pub max_iterations: u32,
    pub max_panels: usize,
    pub blowup_cap: f64,
    pub max_substep_depth: u32,
    /// `picard` or `frozen`.
    pub scheme: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearityBlock {
    /// `zero`, `cubic`, `cubic-plus`, `logistic:λ` or `linear:c`.
    pub id: String,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingBlock {
    /// `reference` for `(b + a)·h₀`, `none`, or any signal registry id.
    pub signal: String,
    /// Spatial profile `h₀`.
    pub profile: String,
    /// Bump shape id of `a`.
    pub bump: String,
    pub max_level: u32,
    /// `profiled` or `paper-literal`.
    pub boundary_mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialBlock {
    pub profile: String,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsBlock {
    /// Cover scales.
    pub eps: Vec<f64>,
    /// Stamp strides compared by the compactness verdict.
    pub strides: Vec<usize>,
    /// Start of the range fed to the cover.
    pub t0: f64,
    /// `sup` or `L2`.
    pub metric: String,
    /// δ values of the modulus of continuity table.
    pub deltas: Vec<f64>,
    /// `sup-norm` or `energy-sup`.
    pub functional: String,
    pub gap_tolerance: f64,
    /// Per-stamp budget of the energy monotonicity check.
    pub energy_tolerance: f64,
    /// Stepanov exponent of the global bound.
    pub p: f64,
    /// Stepanov exponent of the Hölder increment bound.
    pub holder_p: f64,
    /// Stamp stride of the state cloud over which `k_p` is maximised.
    pub cloud_stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: String,
    /// Time between grid snapshots; `0` disables them.
    pub snapshot_every: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "paper-sec4".into(),
            basis: BasisBlock::default(),
            solver: SolverBlock::default(),
            nonlinearity: NonlinearityBlock::default(),
            forcing: ForcingBlock::default(),
            initial: InitialBlock::default(),
            diagnostics: DiagnosticsBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

impl Default for BasisBlock {
    fn default() -> Self {
        Self {
            length: 1.0,
            modes: 64,
            intervals: 256,
        }
    }
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverConfig::new(1e-3, 50.0);
        Self {
            dt: d.dt,
            horizon: d.horizon,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            max_panels: d.max_panels,
            blowup_cap: d.blowup_cap,
            max_substep_depth: d.max_substep_depth,
            scheme: d.scheme.id().into(),
        }
    }
}

impl Default for NonlinearityBlock {
    fn default() -> Self {
        Self {
            id: "cubic".into(),
            dealias: true,
        }
    }
}

impl Default for ForcingBlock {
    fn default() -> Self {
        Self {
            signal: "reference".into(),
            profile: "sin:1".into(),
            bump: BumpShape::Smooth.id().into(),
            max_level: UnboundedAASpec::default().max_level,
            boundary_mode: BoundaryMode::Profiled.id().into(),
        }
    }
}

impl Default for InitialBlock {
    fn default() -> Self {
        Self {
            profile: "sin:1".into(),
            amplitude: 0.5,
        }
    }
}

impl Default for DiagnosticsBlock {
    fn default() -> Self {
        Self {
            eps: vec![0.2, 0.1, 0.05],
            strides: vec![2, 1],
            t0: 0.0,
            metric: Metric::Sup.id().into(),
            deltas: vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2],
            functional: "sup-norm".into(),
            gap_tolerance: 1e-6,
            energy_tolerance: 1e-8,
            p: 1.0,
            holder_p: 2.0,
            cloud_stride: 100,
        }
    }
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            snapshot_every: 1.0,
        }
    }
}

impl ScenarioConfig {
    /// Parses TOML text, applies `overrides` (`section.key`, raw value) and
    /// validates every registry id.
    pub fn parse_with(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = text.parse().context("config is not valid TOML")?;
        for (key, raw) in overrides {
            apply_override(&mut table, key, raw)?;
        }
        let cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .context("config does not match the schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, &[])
    }

    /// Reads `path` and applies the `AALAB_*` variables of the process
    /// environment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse_with(&text, &env_overrides(std::env::vars()))
            .with_context(|| format!("in config {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Checks that every id resolves and every block builds.
    pub fn validate(&self) -> Result<()> {
        let basis = self.basis()?;
        self.problem(&basis)?;
        self.initial_field(&basis)?;
        self.solver_config()?
            .validate()
            .map_err(|e| anyhow!("solver block: {e}"))?;
        self.metric()?;
        self.functional()?;
        let d = &self.diagnostics;
        if d.eps.is_empty() || d.strides.len() < 2 {
            bail!("diagnostics need a nonempty eps ladder and at least two strides");
        }
        if d.strides.contains(&0) || d.cloud_stride == 0 {
            bail!("diagnostic strides must be positive");
        }
        if !(d.p >= 1.0 && d.holder_p >= 1.0) {
            bail!("Stepanov exponents must be at least 1");
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<SpectralBasis> {
        let b = &self.basis;
        assemble_basis(b.length, b.modes, b.intervals).map_err(|e| anyhow!("basis block: {e}"))
    }

    pub fn bump(&self) -> Result<BumpSpec> {
        BumpShape::from_id(&self.forcing.bump)
            .map(BumpSpec::new)
            .ok_or_else(|| anyhow!("unknown bump shape `{}`", self.forcing.bump))
    }

    pub fn unbounded_spec(&self) -> Result<UnboundedAASpec> {
        if self.forcing.max_level == 0 {
            bail!("forcing.max_level must be positive");
        }
        Ok(UnboundedAASpec::new(self.bump()?, self.forcing.max_level))
    }

    pub fn nonlinearity(&self) -> Result<NonlinearitySpec> {
        let mut g = NonlinearitySpec::parse(&self.nonlinearity.id)
            .map_err(|e| anyhow!("nonlinearity.id: {e}"))?;
        g.dealias = self.nonlinearity.dealias;
        Ok(g)
    }

    pub fn boundary_mode(&self) -> Result<BoundaryMode> {
        BoundaryMode::from_id(&self.forcing.boundary_mode)
            .ok_or_else(|| anyhow!("unknown boundary mode `{}`", self.forcing.boundary_mode))
    }

    pub fn forcing(&self, basis: &SpectralBasis) -> Result<ForcingSpec> {
        let h0 = registry::parse_profile(&self.forcing.profile, basis)?;
        let spec = self.unbounded_spec()?;
        let mode = self.boundary_mode()?;
        match self.forcing.signal.as_str() {
            "none" => Ok(ForcingSpec::none()),
            "reference" => ForcingSpec::reference(basis, &h0, spec, mode)
                .map_err(|e| anyhow!("forcing block: {e}")),
            id => {
                let signal = registry::parse_signal(id, spec)?;
                Ok(ForcingSpec::single(signal, &h0))
            }
        }
    }

    pub fn problem(&self, basis: &SpectralBasis) -> Result<Problem> {
        Problem::new(basis.clone(), self.nonlinearity()?, self.forcing(basis)?)
            .map_err(|e| anyhow!("problem: {e}"))
    }

    pub fn initial_field(&self, basis: &SpectralBasis) -> Result<Field> {
        Ok(registry::parse_profile(&self.initial.profile, basis)?.scaled(self.initial.amplitude))
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        let scheme = StepScheme::from_id(&s.scheme)
            .ok_or_else(|| anyhow!("unknown scheme `{}`", s.scheme))?;
        let mut cfg = SolverConfig::new(s.dt, s.horizon);
        cfg.tolerance = s.tolerance;
        cfg.max_iterations = s.max_iterations;
        cfg.max_panels = s.max_panels;
        cfg.blowup_cap = s.blowup_cap;
        cfg.max_substep_depth = s.max_substep_depth;
        cfg.scheme = scheme;
        Ok(cfg)
    }

    pub fn metric(&self) -> Result<Metric> {
        Metric::from_id(&self.diagnostics.metric)
            .ok_or_else(|| anyhow!("unknown metric `{}`", self.diagnostics.metric))
    }

    pub fn functional(&self) -> Result<Functional<'static>> {
        Functional::from_id(&self.diagnostics.functional)
            .ok_or_else(|| anyhow!("unknown functional `{}`", self.diagnostics.functional))
    }
}

/// `AALAB_SOLVER__DT=…` becomes (`solver.dt`, `…`). Keys are lowercased.
pub fn env_overrides(vars: impl IntoIterator<Item = (String, String)>) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vars
        .into_iter()
        .filter_map(|(k, v)| {
            let rest = k.strip_prefix(ENV_PREFIX)?;
            let key = rest
                .split("__")
                .map(str::to_ascii_lowercase)
                .collect::<Vec<_>>()
                .join(".");
            Some((key, v))
        })
        .collect();
    out.sort();
    out
}

fn apply_override(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let (last, sections) = parts
        .split_last()
        .ok_or_else(|| anyhow!("empty override key"))?;
    let mut cur = table;
    for s in sections {
        cur = cur
            .entry(s.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| anyhow!("override `{key}`: `{s}` is not a section"))?;
    }
    cur.insert(last.to_string(), parse_scalar(raw));
    Ok(())
}

/// A TOML value when `raw` parses as one, otherwise the raw string.
fn parse_scalar(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
