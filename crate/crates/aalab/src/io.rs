//! File formats: 15-digit CSV tables, run manifests and trajectory
//! directories.
//!
//! A trajectory directory holds
//!
//! * `manifest.json`: the [`RunManifest`], including the full config echo;
//! * `trace.csv`: `t,sup_norm,energy,iterations,estimated_factor,observed_ratio,substeps`
//!   (step columns are empty on the initial row);
//! * `coeffs.csv`: `t,c1,…,cK`, the sine coefficients at every stamp;
//! * `snapshots.csv`: `t,x0,…,xN`, grid values every `output.snapshot_every`
//!   time units (absent when that is `0`).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use aalab_core::compactness_lab::energy_of_coeffs;
use aalab_core::mild_solver::{BlowUp, StepRecord, Trajectory};
use aalab_core::spectral_heat::SpectralBasis;
use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

pub const MANIFEST: &str = "manifest.json";
pub const TRACE: &str = "trace.csv";
pub const COEFFS: &str = "coeffs.csv";
pub const SNAPSHOTS: &str = "snapshots.csv";

/// `x` with 15 significant digits, trailing zeros removed. Fixed notation
/// for exponents in `-5..15`, scientific otherwise.
pub fn fmt15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let e: i32 = exp.parse().expect("exponent is an integer");
    if (-5..15).contains(&e) {
        trim_zeros(format!("{:.*}", (14 - e).max(0) as usize, x))
    } else {
        format!("{}e{e}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        self.write_to(BufWriter::new(file))
    }
}

/// Outcome of one diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }

    /// `PASS: …` or `FAIL: …`.
    pub fn line(&self) -> String {
        format!(
            "{}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub aalab: String,
    pub aalab_core: String,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            aalab: env!("CARGO_PKG_VERSION").into(),
            aalab_core: aalab_core::VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUpRecord {
    pub time: f64,
    pub sup: f64,
}

/// One manifest per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    /// The effective config, as TOML.
    pub config: String,
    pub versions: Versions,
    pub wall_clock_seconds: f64,
    pub stamps: usize,
    pub blowup: Option<BlowUpRecord>,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl RunManifest {
    pub fn config(&self) -> Result<ScenarioConfig> {
        ScenarioConfig::parse(&self.config).context("manifest config echo")
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("{} is not a run manifest", path.display()))
    }
}

/// Writes `trace.csv`, `coeffs.csv` and (when enabled) `snapshots.csv`.
pub fn write_trajectory(
    dir: &Path,
    basis: &SpectralBasis,
    traj: &Trajectory,
    snapshot_every: f64,
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut trace = Table::new(&[
        "t",
        "sup_norm",
        "energy",
        "iterations",
        "estimated_factor",
        "observed_ratio",
        "substeps",
    ]);
    for i in 0..traj.len() {
        let mut row = vec![
            fmt15(traj.stamps()[i]),
            fmt15(traj.sup_trace()[i]),
            fmt15(energy_of_coeffs(traj.coeffs(i))),
        ];
        match i.checked_sub(1).and_then(|j| traj.steps().get(j)) {
            Some(s) => row.extend([
                s.iterations.to_string(),
                fmt15(s.estimated_factor),
                fmt15(s.observed_ratio),
                s.substeps.to_string(),
            ]),
            None => row.extend(std::iter::repeat(String::new()).take(4)),
        }
        trace.push(row);
    }
    trace.write_file(&dir.join(TRACE))?;

    let k = basis.modes();
    let mut header = vec!["t".to_string()];
    header.extend((1..=k).map(|q| format!("c{q}")));
    let mut coeffs = Table {
        header,
        rows: Vec::with_capacity(traj.len()),
    };
    for i in 0..traj.len() {
        let mut row = Vec::with_capacity(k + 1);
        row.push(fmt15(traj.stamps()[i]));
        row.extend(traj.coeffs(i).iter().map(|&c| fmt15(c)));
        coeffs.rows.push(row);
    }
    coeffs.write_file(&dir.join(COEFFS))?;

    let snap_path = dir.join(SNAPSHOTS);
    if snapshot_every > 0.0 {
        let mut header = vec!["t".to_string()];
        header.extend((0..basis.grid_len()).map(|j| format!("x{j}")));
        let mut snaps = Table {
            header,
            rows: Vec::new(),
        };
        let mut next = traj.start();
        for i in 0..traj.len() {
            let t = traj.stamps()[i];
            if t + 1e-9 * snapshot_every < next && i + 1 != traj.len() {
                continue;
            }
            let grid = basis.to_grid(traj.coeffs(i)).map_err(|e| anyhow!("{e}"))?;
            let mut row = vec![fmt15(t)];
            row.extend(grid.iter().map(|&v| fmt15(v)));
            snaps.rows.push(row);
            while next <= t + 1e-9 * snapshot_every {
                next += snapshot_every;
            }
        }
        snaps.write_file(&snap_path)?;
    } else if snap_path.exists() {
        std::fs::remove_file(&snap_path)?;
    }
    Ok(())
}

/// A trajectory directory read back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub manifest: RunManifest,
    pub config: ScenarioConfig,
    pub basis: SpectralBasis,
    pub trajectory: Trajectory,
}

fn parse_cell(s: &str, path: &Path, line: usize) -> Result<f64> {
    s.parse()
        .with_context(|| format!("{}:{line}: `{s}` is not a number", path.display()))
}

pub fn read_trajectory(dir: &Path) -> Result<StoredRun> {
    let manifest = RunManifest::read(dir)?;
    let config = manifest.config()?;
    let basis = config.basis()?;
    let k = basis.modes();

    let path = dir.join(COEFFS);
    let mut reader =
        csv::Reader::from_path(&path).with_context(|| format!("cannot open {}", path.display()))?;
    if reader.headers()?.len() != k + 1 {
        bail!(
            "{}: expected {} columns for {k} modes",
            path.display(),
            k + 1
        );
    }
    let (mut stamps, mut coeffs) = (Vec::new(), Vec::new());
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{}: bad row {}", path.display(), i + 2))?;
        if row.len() != k + 1 {
            bail!("{}:{}: expected {} columns", path.display(), i + 2, k + 1);
        }
        stamps.push(parse_cell(&row[0], &path, i + 2)?);
        for cell in row.iter().skip(1) {
            coeffs.push(parse_cell(cell, &path, i + 2)?);
        }
    }

    let path = dir.join(TRACE);
    let mut reader =
        csv::Reader::from_path(&path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut steps = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{}: bad row {}", path.display(), i + 2))?;
        if row.len() != 7 {
            bail!("{}:{}: expected 7 columns", path.display(), i + 2);
        }
        if i == 0 {
            continue;
        }
        let line = i + 2;
        steps.push(StepRecord {
            iterations: row[3]
                .parse()
                .with_context(|| format!("{}:{line}: iterations", path.display()))?,
            estimated_factor: parse_cell(&row[4], &path, line)?,
            observed_ratio: parse_cell(&row[5], &path, line)?,
            substeps: row[6]
                .parse()
                .with_context(|| format!("{}:{line}: substeps", path.display()))?,
        });
    }
    let blowup = manifest.blowup.map(|b| BlowUp {
        time: b.time,
        sup: b.sup,
    });
    let trajectory = Trajectory::from_parts(&basis, stamps, coeffs, steps, blowup)
        .map_err(|e| anyhow!("{}: {e}", dir.display()))?;
    if trajectory.len() != manifest.stamps {
        bail!(
            "{}: manifest lists {} stamps, coeffs.csv has {}",
            dir.display(),
            manifest.stamps,
            trajectory.len()
        );
    }
    Ok(StoredRun {
        manifest,
        config,
        basis,
        trajectory,
    })
}
