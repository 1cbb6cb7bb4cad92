//! `sshchain` — command-line front end for the sshchain toolkit.
//!
//! Every subcommand reads its parameters from `--config` (JSON or TOML, or a
//! manifest from a previous run), writes CSV outputs plus a `manifest.json`
//! into `--out`, and exits 0 on success, 1 on runtime failures (solver,
//! I/O), 2 on bad configuration.

mod config;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sshchain::sweep::RunSettings;

pub enum CliError {
    /// Bad input: config parse/validation, invalid flag values. Exit 2.
    Config(String),
    /// Failure while running: solver breakdown, unwritable output. Exit 1.
    Runtime(String),
}

#[derive(Parser)]
#[command(name = "sshchain", version, about = "Spectra, localization metrics, and winding numbers for a quasiperiodic non-Hermitian SSH chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Parameter file: JSON or TOML, or a manifest.json from a previous run.
    #[arg(long, global = true, env = "SSHCHAIN_CONFIG")]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, env = "SSHCHAIN_OUT", default_value = ".")]
    out: PathBuf,

    /// Worker threads for sweep grids (default: one per core).
    #[arg(long, global = true, env = "SSHCHAIN_JOBS")]
    jobs: Option<usize>,

    /// Override the size-based IPR threshold.
    #[arg(long, global = true, env = "SSHCHAIN_ETA_IPR")]
    eta_ipr: Option<f64>,

    /// Override the size-based NPR threshold.
    #[arg(long, global = true, env = "SSHCHAIN_ETA_NPR")]
    eta_npr: Option<f64>,

    /// Winding trace trim fraction per chain end, in [0, 0.5).
    #[arg(long, global = true, env = "SSHCHAIN_TRIM")]
    trim: Option<f64>,

    /// Relative eigenpair residual tolerance.
    #[arg(long, global = true, env = "SSHCHAIN_TOL_EIG")]
    tol_eig: Option<f64>,

    /// Also write plot.py, a matplotlib script that renders the CSV outputs.
    #[arg(long, global = true, env = "SSHCHAIN_EMIT_PLOT")]
    emit_plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one parameter point and dump the spectrum with per-state
    /// IPR/NPR.
    Spectrum,
    /// Sweep W1 or gamma over a uniform grid and tabulate localization,
    /// edge, and winding observables.
    Sweep,
    /// Real-space winding number at one parameter point.
    Winding,
    /// Re-measure one parameter point across chain sizes.
    Fss,
    /// Per-site weight profiles for selected states.
    Snapshot,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    // The BLAS worker pool would fight rayon's over the same cores.
    std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set up {jobs} worker threads: {e}")))?;
    }

    let path = cli.config.as_deref().ok_or_else(|| {
        CliError::Config("--config is required (JSON or TOML parameter file)".into())
    })?;
    let loaded = config::load(path).map_err(CliError::Config)?;
    let settings = resolve_settings(&cli, loaded.manifest_settings)?;

    std::fs::create_dir_all(&cli.out).map_err(|e| {
        CliError::Runtime(format!("cannot create output dir {}: {e}", cli.out.display()))
    })?;
    let ctx = run::RunContext::new(
        cli.out,
        settings,
        cli.jobs,
        cli.emit_plot,
        loaded.config.clone(),
    );

    let cfg = &loaded.config;
    match cli.command {
        Command::Spectrum => {
            let (params, dump) = config::spectrum_config(cfg).map_err(CliError::Config)?;
            run::cmd_spectrum(&ctx, params, dump)
        }
        Command::Sweep => {
            let spec = config::sweep_config(cfg).map_err(CliError::Config)?;
            run::cmd_sweep(&ctx, spec)
        }
        Command::Winding => {
            let params = config::winding_config(cfg).map_err(CliError::Config)?;
            run::cmd_winding(&ctx, params)
        }
        Command::Fss => {
            let (params, sizes) = config::fss_config(cfg).map_err(CliError::Config)?;
            run::cmd_fss(&ctx, params, sizes)
        }
        Command::Snapshot => {
            let (params, selection) = config::snapshot_config(cfg).map_err(CliError::Config)?;
            run::cmd_snapshot(&ctx, params, selection)
        }
    }
}

/// Settings priority: built-in defaults < manifest `settings` block (when the
/// config is a fed-back manifest) < explicit CLI flags.
fn resolve_settings(
    cli: &Cli,
    manifest_settings: Option<serde_json::Value>,
) -> Result<RunSettings, CliError> {
    let mut s = match manifest_settings {
        Some(v) => serde_json::from_value(v)
            .map_err(|e| CliError::Config(format!("manifest settings block did not parse: {e}")))?,
        None => RunSettings::default(),
    };
    if let Some(v) = cli.tol_eig {
        if v <= 0.0 || v.is_nan() {
            return Err(CliError::Config(format!("--tol-eig must be positive, got {v}")));
        }
        s.tol_eig = v;
    }
    if let Some(v) = cli.trim {
        if !(0.0..0.5).contains(&v) {
            return Err(CliError::Config(format!(
                "--trim must lie in [0, 0.5), got {v}"
            )));
        }
        s.trim_fraction = v;
    }
    if let Some(v) = cli.eta_ipr {
        if v <= 0.0 || v.is_nan() {
            return Err(CliError::Config(format!("--eta-ipr must be positive, got {v}")));
        }
        s.eta_ipr = Some(v);
    }
    if let Some(v) = cli.eta_npr {
        if v <= 0.0 || v.is_nan() {
            return Err(CliError::Config(format!("--eta-npr must be positive, got {v}")));
        }
        s.eta_npr = Some(v);
    }
    Ok(s)
}
