//! Command implementations: drive the library, write CSVs, and record a
//! manifest describing exactly what was produced.
//!
//! Every file lands atomically (written to a `.tmp` sibling, then renamed),
//! so a killed run never leaves a partial CSV behind. The manifest doubles
//! as a config: feeding `manifest.json` back through `--config` reproduces
//! the run with the same parameters and settings.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sshchain::localization::{aggregate, Thresholds};
use sshchain::model::build_hamiltonian;
use sshchain::spectral::eigendecompose;
use sshchain::sweep::{
    csv_float, detect_transitions, finite_size_scan, run_sweep, snapshot, RunSettings, Selection,
    SpectrumRow, StateProfile, SweepSpec,
};
use sshchain::topology::{winding_number, WindingConfig, WINDING_IM_TOL};
use sshchain::{Error as LibError, Hamiltonian, ModelParams, WINDING_CALIBRATION};

use crate::CliError;

/// Library errors split into bad input (exit 2) and failures at run time
/// (exit 1).
pub fn lib_err(e: LibError) -> CliError {
    match e {
        LibError::Eigensolver(_) | LibError::ResidualTolerance { .. } | LibError::ZeroVector => {
            CliError::Runtime(e.to_string())
        }
        _ => CliError::Config(e.to_string()),
    }
}

pub struct RunContext {
    pub out: PathBuf,
    pub settings: RunSettings,
    pub jobs: Option<usize>,
    pub emit_plot: bool,
    /// Resolved config echoed into the manifest.
    pub config: Value,
    started: Instant,
}

impl RunContext {
    pub fn new(
        out: PathBuf,
        settings: RunSettings,
        jobs: Option<usize>,
        emit_plot: bool,
        config: Value,
    ) -> Self {
        RunContext {
            out,
            settings,
            jobs,
            emit_plot,
            config,
            started: Instant::now(),
        }
    }

    fn write(&self, name: &str, content: &str, outputs: &mut Vec<String>) -> Result<(), CliError> {
        write_atomic(&self.out.join(name), content.as_bytes())?;
        outputs.push(name.to_string());
        Ok(())
    }

    /// Emits the optional plot script and the manifest; call last so the
    /// manifest's output list and wall time are complete.
    fn finish(
        &self,
        command: &str,
        mut outputs: Vec<String>,
        diagnostics: Value,
    ) -> Result<(), CliError> {
        if self.emit_plot {
            self.write("plot.py", crate::plot::SCRIPT, &mut outputs)?;
        }
        let manifest = json!({
            "tool": {"name": "sshchain", "version": env!("CARGO_PKG_VERSION")},
            "command": command,
            "config": self.config,
            "settings": settings_json(&self.settings, self.jobs),
            "calibration_constant": WINDING_CALIBRATION,
            "outputs": outputs,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "diagnostics": diagnostics,
        });
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Runtime(format!("manifest serialization: {e}")))?;
        text.push('\n');
        write_atomic(&self.out.join("manifest.json"), text.as_bytes())
    }
}

fn settings_json(settings: &RunSettings, jobs: Option<usize>) -> Value {
    let mut v = serde_json::to_value(settings).expect("settings serialize");
    v.as_object_mut()
        .expect("settings object")
        .insert("jobs".into(), json!(jobs));
    v
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::Runtime(format!("write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        CliError::Runtime(format!("rename {} -> {}: {e}", tmp.display(), path.display()))
    })
}

fn thresholds(settings: &RunSettings, sites: usize) -> Thresholds {
    let d = Thresholds::for_size(sites);
    Thresholds::custom(
        settings.eta_ipr.unwrap_or(d.eta_ipr),
        settings.eta_npr.unwrap_or(d.eta_npr),
    )
}

const SPECTRUM_HEADER: &str = "index,re_E,im_E,abs_E,residual,ipr,npr,is_edge";

fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index,
            csv_float(r.re_e),
            csv_float(r.im_e),
            csv_float(r.abs_e),
            csv_float(r.residual),
            csv_float(r.ipr),
            csv_float(r.npr),
            r.is_edge,
        ));
    }
    out
}

fn matrix_csv(h: &Hamiltonian) -> String {
    let mut out = String::from("row,col,re,im\n");
    for (row, col, re, im) in h.triplets() {
        out.push_str(&format!(
            "{row},{col},{},{}\n",
            csv_float(re),
            csv_float(im)
        ));
    }
    out
}

fn snapshot_csv(profiles: &[StateProfile]) -> String {
    let mut out = String::from("state,re_E,im_E,ipr,npr,site,weight\n");
    for p in profiles {
        for (site, w) in p.weights.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{site},{}\n",
                p.state,
                csv_float(p.re_e),
                csv_float(p.im_e),
                csv_float(p.ipr),
                csv_float(p.npr),
                csv_float(*w),
            ));
        }
    }
    out
}

pub fn cmd_spectrum(
    ctx: &RunContext,
    params: ModelParams,
    dump_matrix: bool,
) -> Result<(), CliError> {
    let h = build_hamiltonian(&params).map_err(lib_err)?;
    let eig = eigendecompose(&h, ctx.settings.tol_eig).map_err(lib_err)?;
    let deg_tol = ctx.settings.degeneracy_factor * eig.h_norm;
    let th = thresholds(&ctx.settings, h.dim());
    let report = aggregate(&eig, &th, deg_tol).map_err(lib_err)?;

    let rows: Vec<SpectrumRow> = (0..eig.dim())
        .map(|k| SpectrumRow {
            index: k,
            re_e: eig.eigenvalues[k].re,
            im_e: eig.eigenvalues[k].im,
            abs_e: eig.eigenvalues[k].norm(),
            residual: eig.residual_norms[k],
            ipr: report.ipr[k],
            npr: report.npr[k],
            is_edge: report.edge.contains(&k),
        })
        .collect();

    let mut outputs = Vec::new();
    ctx.write("spectrum.csv", &spectrum_csv(&rows), &mut outputs)?;
    if dump_matrix {
        ctx.write("matrix.csv", &matrix_csv(&h), &mut outputs)?;
    }
    ctx.finish(
        "spectrum",
        outputs,
        json!({
            "sites": h.dim(),
            "max_residual": eig.residual_norms.iter().copied().fold(0.0, f64::max),
            "biorth_error": eig.biorth_error,
            "warnings": eig.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "thresholds": {"eta_ipr": th.eta_ipr, "eta_npr": th.eta_npr},
            "regime": report.regime.to_string(),
            "edge_states": report.edge,
            "tie_at_cut": report.tie_at_cut,
        }),
    )
}

pub fn cmd_sweep(ctx: &RunContext, spec: SweepSpec) -> Result<(), CliError> {
    let result = run_sweep(&spec, &ctx.settings).map_err(lib_err)?;
    let rows = &result.table.rows;

    let mut outputs = Vec::new();
    ctx.write("sweep.csv", &result.table.to_csv(), &mut outputs)?;
    let mut spectra_index = Vec::new();
    for (i, (x, spectrum)) in result.spectra.iter().enumerate() {
        let name = format!("spectrum_{i:04}.csv");
        ctx.write(&name, &spectrum_csv(spectrum), &mut outputs)?;
        spectra_index.push(json!({"file": name, "axis": x}));
    }
    let mut snapshot_index = Vec::new();
    for (i, (x, profiles)) in result.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:04}.csv");
        ctx.write(&name, &snapshot_csv(profiles), &mut outputs)?;
        snapshot_index.push(json!({"file": name, "axis": x}));
    }

    // Transition candidates from the NPR-edge derivative, when that column
    // was computed.
    let xs: Vec<f64> = rows.iter().map(|r| r.axis).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.dnpr_edge).collect();
    let transitions = if d.len() >= 3 && d.iter().all(|v| v.is_finite()) {
        detect_transitions(&xs, &d, ctx.settings.prominence)
            .map_err(lib_err)?
            .iter()
            .map(|t| json!({"index": t.index, "axis": t.x, "strength": t.strength}))
            .collect::<Vec<_>>()
    } else {
        Vec::new()
    };

    let flagged: Vec<Value> = rows
        .iter()
        .filter(|r| !r.flags.is_empty())
        .map(|r| json!({"axis": r.axis, "flags": r.flags}))
        .collect();
    let th = thresholds(&ctx.settings, 2 * spec.base.n_cells);

    ctx.finish(
        "sweep",
        outputs,
        json!({
            "points": rows.len(),
            "sites": 2 * spec.base.n_cells,
            "failed_points": rows
                .iter()
                .filter(|r| r.flags.iter().any(|f| f.starts_with("solver_error")))
                .count(),
            "thresholds": {"eta_ipr": th.eta_ipr, "eta_npr": th.eta_npr},
            "transitions": transitions,
            "flagged": flagged,
            "spectra": spectra_index,
            "snapshots": snapshot_index,
        }),
    )
}

pub fn cmd_winding(ctx: &RunContext, params: ModelParams) -> Result<(), CliError> {
    let h = build_hamiltonian(&params).map_err(lib_err)?;
    let eig = eigendecompose(&h, ctx.settings.tol_eig).map_err(lib_err)?;
    let cfg = WindingConfig {
        trim_fraction: ctx.settings.trim_fraction,
        ..WindingConfig::default()
    };
    let rec = winding_number(&eig, &cfg, ctx.settings.degeneracy_factor * eig.h_norm)
        .map_err(lib_err)?;

    println!(
        "mu = {:.6} (raw = {:.6}, |Im| = {:.3e})",
        rec.mu_calibrated, rec.mu_raw, rec.im_residual
    );

    ctx.finish(
        "winding",
        Vec::new(),
        json!({
            "sites": h.dim(),
            "mu_raw": rec.mu_raw,
            "mu_calibrated": rec.mu_calibrated,
            "im_residual": rec.im_residual,
            "im_tol": WINDING_IM_TOL,
            "trim_fraction": rec.trim_fraction,
            "occupied_rule": rec.occupied_rule.to_string(),
            "cut_tie": rec.cut_tie,
            "valid": rec.im_residual <= WINDING_IM_TOL && !rec.cut_tie,
            "biorth_error": eig.biorth_error,
            "warnings": eig.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
    )
}

pub fn cmd_fss(ctx: &RunContext, params: ModelParams, sizes: Vec<usize>) -> Result<(), CliError> {
    let records = finite_size_scan(&params, &sizes, &ctx.settings).map_err(lib_err)?;

    let mut csv = String::from("sites,ipr_bulk,npr_bulk\n");
    for r in &records {
        csv.push_str(&format!(
            "{},{},{}\n",
            r.sites,
            csv_float(r.ipr_bulk),
            csv_float(r.npr_bulk)
        ));
    }
    let mut outputs = Vec::new();
    ctx.write("fss.csv", &csv, &mut outputs)?;

    let per_size: Vec<Value> = records
        .iter()
        .map(|r| {
            let th = thresholds(&ctx.settings, r.sites);
            json!({
                "sites": r.sites,
                "eta_ipr": th.eta_ipr,
                "eta_npr": th.eta_npr,
                "npr_scaled": r.npr_bulk * r.sites as f64,
            })
        })
        .collect();
    ctx.finish("fss", outputs, json!({"sizes": sizes, "per_size": per_size}))
}

pub fn cmd_snapshot(
    ctx: &RunContext,
    params: ModelParams,
    selection: Selection,
) -> Result<(), CliError> {
    let profiles = snapshot(&params, selection, &ctx.settings).map_err(lib_err)?;

    let mut outputs = Vec::new();
    ctx.write("snapshot.csv", &snapshot_csv(&profiles), &mut outputs)?;

    let selection_name = match selection {
        Selection::All => "all_states".to_string(),
        Selection::BulkOnly => "bulk_only".to_string(),
        Selection::LowestAbs(n) => format!("lowest_abs_energy({n})"),
    };
    ctx.finish(
        "snapshot",
        outputs,
        json!({
            "sites": 2 * params.n_cells,
            "states": profiles.len(),
            "selection": selection_name,
        }),
    )
}
