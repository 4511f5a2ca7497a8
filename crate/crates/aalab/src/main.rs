//! `aalab` command line.
//!
//! Exit codes: 0 on success, 1 on errors or a failed diagnostic, 2 when a
//! simulation blows up.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aalab::config::ScenarioConfig;
use aalab::experiments;
use aalab::io::{fmt15, read_trajectory, Table, Verdict};
use aalab::registry::{parse_ladder, parse_signal};
use aalab_core::aa_signals::{
    aa_translation_test, pow3, stepanov_norm, BumpShape, BumpSpec, SignalExt, StepanovConfig,
    UnboundedAASpec,
};
use aalab_core::compactness_lab::Functional;
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "aalab",
    version,
    about = "Stepanov almost automorphic signals and mild solutions of forced heat equations"
)]
struct Cli {
    /// Scenario config (TOML); `AALAB_<SECTION>__<KEY>` variables override keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (simulate) or CSV file (signal, diagnose).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the scenario of `--config` and write a trajectory directory.
    Simulate,
    /// Evaluate and analyse registry signals.
    #[command(subcommand)]
    Signal(SignalCommand),
    /// Diagnostics on trajectory directories written by `simulate`.
    #[command(subcommand)]
    Diagnose(DiagnoseCommand),
}

#[derive(Args, Debug, Clone)]
struct SignalOpts {
    /// Level cutoff of `a`.
    #[arg(long, default_value_t = 8)]
    nmax: u32,
    /// Bump shape (`smooth` or `cos2`).
    #[arg(long, default_value = "smooth")]
    bump: String,
}

#[derive(Subcommand, Debug)]
enum SignalCommand {
    /// Values at the requested times.
    Eval {
        id: String,
        /// Evaluation times.
        #[arg(long = "t", num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, required = true)]
        t: Vec<f64>,
        #[command(flatten)]
        opts: SignalOpts,
    },
    /// Stepanov norm over a scan range.
    Norm {
        id: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
        to: f64,
        #[command(flatten)]
        opts: SignalOpts,
    },
    /// Translation-ladder distances; one row per shift with the largest
    /// distance to any later shift.
    AaTest {
        id: String,
        /// `pow3[:a-b]`, `sqrt2[:n]`, `int[:n]` or `list:s1,s2,...`.
        #[arg(long, default_value = "pow3")]
        ladder: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Window origins; defaults to `3^j - 1/2` for `j = 1..8`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        windows: Vec<f64>,
        #[arg(long, default_value_t = aalab_core::aa_signals::DEFAULT_VERDICT_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        opts: SignalOpts,
    },
}

#[derive(Subcommand, Debug)]
enum DiagnoseCommand {
    /// Greedy cover counts at two sampling densities.
    Compactness {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        strides: Vec<usize>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        metric: Option<String>,
    },
    /// `E(u - v)` along two runs with the same stamps.
    Energy {
        u: PathBuf,
        v: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Subvariant values and the parallelogram gap of the best two runs.
    Subvariant {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long)]
        functional: Option<String>,
        #[arg(long)]
        gap_tolerance: Option<f64>,
    },
    /// Modulus of continuity table.
    UcModulus {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
    },
}

/// A run that finished but must exit non-zero.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Exit>() {
            Some(Exit(code)) => ExitCode::from(*code),
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the thread pool")?;
    }
    match &cli.command {
        Command::Simulate => simulate(cli),
        Command::Signal(cmd) => signal(cli, cmd),
        Command::Diagnose(cmd) => diagnose(cli, cmd),
    }
}

fn load_config(cli: &Cli) -> Result<Option<ScenarioConfig>> {
    cli.config.as_deref().map(ScenarioConfig::load).transpose()
}

fn simulate(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?.ok_or_else(|| anyhow!("simulate needs --config"))?;
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let (run, manifest) = experiments::simulate(&cfg, &dir)?;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "wrote {} stamps to {}",
        run.trajectory.len(),
        dir.display()
    )?;
    for (name, v) in &manifest.verdicts {
        writeln!(out, "{name}: {}", v.line())?;
    }
    if run.trajectory.blowup().is_some() {
        return Err(Exit(2).into());
    }
    Ok(())
}

fn emit(cli: &Cli, table: &Table, verdict: Option<&Verdict>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match &cli.out {
        Some(path) => table.write_file(path)?,
        None => table.write_to(&mut out)?,
    }
    if let Some(v) = verdict {
        writeln!(out, "{}", v.line())?;
        if !v.pass {
            return Err(Exit(1).into());
        }
    }
    Ok(())
}

fn unbounded_spec(opts: &SignalOpts) -> Result<UnboundedAASpec> {
    let shape = BumpShape::from_id(&opts.bump)
        .ok_or_else(|| anyhow!("unknown bump shape `{}`", opts.bump))?;
    if opts.nmax == 0 {
        bail!("--nmax must be positive");
    }
    Ok(UnboundedAASpec::new(BumpSpec::new(shape), opts.nmax))
}

fn signal(cli: &Cli, cmd: &SignalCommand) -> Result<()> {
    match cmd {
        SignalCommand::Eval { id, t, opts } => {
            let f = parse_signal(id, unbounded_spec(opts)?)?;
            let mut table = Table::new(&["t", "value"]);
            for &s in t {
                let v = f.value(s).map_err(|e| anyhow!("{e}"))?;
                table.push(vec![fmt15(s), fmt15(v)]);
            }
            emit(cli, &table, None)
        }
        SignalCommand::Norm {
            id,
            p,
            from,
            to,
            opts,
        } => {
            let f = parse_signal(id, unbounded_spec(opts)?)?;
            let cfg = StepanovConfig::new(*p, *from, *to).map_err(|e| anyhow!("{e}"))?;
            let norm = stepanov_norm(&f, &cfg).map_err(|e| anyhow!("{e}"))?;
            let mut table = Table::new(&["p", "t_min", "t_max", "norm"]);
            table.push(vec![fmt15(*p), fmt15(*from), fmt15(*to), fmt15(norm)]);
            emit(cli, &table, None)
        }
        SignalCommand::AaTest {
            id,
            ladder,
            p,
            windows,
            threshold,
            opts,
        } => {
            let f = parse_signal(id, unbounded_spec(opts)?)?;
            let ladder = parse_ladder(ladder)?;
            let windows = if windows.is_empty() {
                (1..=8).map(|j| pow3(j) - 0.5).collect()
            } else {
                windows.clone()
            };
            let cfg = StepanovConfig::new(*p, 0.0, 0.0).map_err(|e| anyhow!("{e}"))?;
            let r = aa_translation_test(&f, &ladder, &cfg, &windows, *threshold)
                .map_err(|e| anyhow!("{e}"))?;
            let mut table = Table::new(&["index", "shift", "tail_distance"]);
            for (m, (s, d)) in r.ladder.iter().zip(&r.tail).enumerate() {
                table.push(vec![m.to_string(), fmt15(*s), fmt15(*d)]);
            }
            emit(cli, &table, None)
        }
    }
}

/// The config echoed by the first run, with `--config` taking precedence.
fn diagnose_config(cli: &Cli, dir: &Path) -> Result<(ScenarioConfig, aalab::io::StoredRun)> {
    let stored = read_trajectory(dir)?;
    let cfg = match load_config(cli)? {
        Some(c) => c,
        None => stored.config.clone(),
    };
    Ok((cfg, stored))
}

fn diagnose(cli: &Cli, cmd: &DiagnoseCommand) -> Result<()> {
    match cmd {
        DiagnoseCommand::Compactness {
            dir,
            eps,
            strides,
            t0,
            metric,
        } => {
            let (mut cfg, run) = diagnose_config(cli, dir)?;
            let d = &mut cfg.diagnostics;
            if !eps.is_empty() {
                d.eps = eps.clone();
            }
            if !strides.is_empty() {
                d.strides = strides.clone();
            }
            if let Some(t0) = t0 {
                d.t0 = *t0;
            }
            if let Some(m) = metric {
                d.metric = m.clone();
            }
            cfg.metric()?;
            let (report, verdict) =
                experiments::compactness_check(&run.basis, &run.trajectory, &cfg)?;
            emit(
                cli,
                &experiments::compactness_table(&report),
                Some(&verdict),
            )
        }
        DiagnoseCommand::Energy { u, v, tolerance } => {
            let (cfg, a) = diagnose_config(cli, u)?;
            let b = read_trajectory(v)?;
            let tol = tolerance.unwrap_or(cfg.diagnostics.energy_tolerance);
            let (report, verdict) = experiments::energy_check(&a.trajectory, &b.trajectory, tol)?;
            emit(cli, &experiments::energy_table(&report), Some(&verdict))
        }
        DiagnoseCommand::Subvariant {
            dirs,
            functional,
            gap_tolerance,
        } => {
            let (cfg, first) = diagnose_config(cli, &dirs[0])?;
            let mut trajs = vec![first.trajectory];
            for d in &dirs[1..] {
                trajs.push(read_trajectory(d)?.trajectory);
            }
            let f = match functional {
                Some(id) => {
                    Functional::from_id(id).ok_or_else(|| anyhow!("unknown functional `{id}`"))?
                }
                None => cfg.functional()?,
            };
            let tol = gap_tolerance.unwrap_or(cfg.diagnostics.gap_tolerance);
            let (report, verdict) = experiments::subvariant_check(&first.basis, &trajs, f, tol)?;
            emit(cli, &experiments::subvariant_table(&report), Some(&verdict))
        }
        DiagnoseCommand::UcModulus { dir, deltas } => {
            let (cfg, run) = diagnose_config(cli, dir)?;
            let deltas = if deltas.is_empty() {
                cfg.diagnostics.deltas.clone()
            } else {
                deltas.clone()
            };
            let rows = experiments::modulus_table(&run.basis, &run.trajectory, &deltas)?;
            emit(
                cli,
                &experiments::modulus_csv(&rows),
                Some(&experiments::modulus_verdict(&rows)),
            )
        }
    }
}
