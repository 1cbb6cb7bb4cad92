//! Parameter sweeps, numerical derivatives, transition detection,
//! finite-size scans, and per-state snapshots.
//!
//! A sweep walks one model parameter over a uniform grid, decomposes the
//! chain at every point (in parallel), and tabulates the winding number,
//! edge energy, participation-ratio averages, and regime call per point.
//! Downstream of the table, [`derivative`] + [`detect_transitions`] locate
//! boundaries as prominence peaks of |dNPR⁰/dx|, [`finite_size_scan`]
//! re-measures one parameter point across chain sizes, and [`snapshot`]
//! dumps per-site weights for individual states. Failed grid points are
//! recorded in the row's `flags` instead of aborting the sweep.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::{aggregate, Regime, Thresholds};
use crate::model::{build_hamiltonian, ModelParams};
use crate::spectral::{
    eigendecompose, eigendecompose_right_only, split_edge_bulk, EigenSystem,
    DEGENERACY_TOL_FACTOR,
};
use crate::topology::{winding_number, OccupiedRule, WindingConfig, WINDING_IM_TOL};

/// Which model parameter the sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    W1,
    Gamma,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::W1 => "w1",
            Axis::Gamma => "gamma",
        })
    }
}

/// How W₂ is tied to W₁ along the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum W2Rule {
    /// W₂ = W₁.
    Equal,
    /// W₂ fixed.
    Constant(f64),
    /// W₂ = a·cos(b·W₁) + c.
    Cosine { a: f64, b: f64, c: f64 },
}

impl W2Rule {
    pub fn w2_for(&self, w1: f64) -> f64 {
        match *self {
            W2Rule::Equal => w1,
            W2Rule::Constant(c) => c,
            W2Rule::Cosine { a, b, c } => a * (b * w1).cos() + c,
        }
    }
}

/// Which optional quantities a sweep evaluates per point. Columns whose flag
/// is off are emitted as NaN (regime as an empty cell) so the table shape
/// never changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeFlags {
    /// Real-space winding (needs the full biorthogonal decomposition,
    /// roughly doubling the per-point cost).
    #[serde(default)]
    pub winding: bool,
    /// Participation metrics, bulk aggregates, and the regime label.
    #[serde(default = "flag_on")]
    pub localization: bool,
    /// Edge-state columns (absE_edge, ipr_edge, npr_edge, dnpr_edge). The
    /// bulk aggregates always exclude the two edge-split states either way.
    #[serde(default = "flag_on")]
    pub edge: bool,
    /// Keep the full spectrum with per-state metrics at every grid point.
    #[serde(default)]
    pub spectrum_dump: bool,
    /// Capture per-site weight profiles of the bulk states at the grid
    /// points nearest these axis values.
    #[serde(default)]
    pub snapshots_at: Vec<f64>,
}

fn flag_on() -> bool {
    true
}

impl Default for ComputeFlags {
    fn default() -> Self {
        ComputeFlags {
            winding: false,
            localization: true,
            edge: true,
            spectrum_dump: false,
            snapshots_at: Vec::new(),
        }
    }
}

/// A single-axis sweep over a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub num_points: usize,
    /// Parameters at rest; the axis field (and W₂ under a rule) is
    /// overwritten per grid point.
    pub base: ModelParams,
    /// Tie rule for W₂; `None` keeps `base.w2` fixed.
    pub w2_rule: Option<W2Rule>,
    #[serde(default)]
    pub compute: ComputeFlags,
}

impl SweepSpec {
    /// The uniform grid, endpoints inclusive.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.num_points < 2 {
            return Err(Error::InvalidSweep(format!(
                "need at least 2 grid points, got {}",
                self.num_points
            )));
        }
        if self.start >= self.stop || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "grid range [{}, {}] is not increasing and finite",
                self.start, self.stop
            )));
        }
        let n = self.num_points;
        let step = (self.stop - self.start) / (n - 1) as f64;
        Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect())
    }

    /// Model parameters at one grid value.
    pub fn params_at(&self, x: f64) -> ModelParams {
        let mut p = self.base.clone();
        match self.axis {
            Axis::W1 => p.w1 = x,
            Axis::Gamma => p.gamma = x,
        }
        if let Some(rule) = &self.w2_rule {
            p.w2 = rule.w2_for(p.w1);
        }
        p
    }
}

/// Numerical tolerances and thresholds shared by the sweep drivers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    /// Relative eigenpair residual tolerance.
    pub tol_eig: f64,
    /// Degeneracy tolerance as a fraction of ‖H‖_∞.
    pub degeneracy_factor: f64,
    /// Winding trim fraction per chain end.
    pub trim_fraction: f64,
    /// Override for the size-dependent IPR threshold.
    pub eta_ipr: Option<f64>,
    /// Override for the size-dependent NPR threshold.
    pub eta_npr: Option<f64>,
    /// Transition peaks must exceed this multiple of the median |derivative|.
    pub prominence: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            tol_eig: crate::spectral::DEFAULT_TOL_EIG,
            degeneracy_factor: DEGENERACY_TOL_FACTOR,
            trim_fraction: 0.2,
            eta_ipr: None,
            eta_npr: None,
            prominence: 20.0,
        }
    }
}

impl RunSettings {
    fn validated(&self) -> Result<()> {
        if self.tol_eig <= 0.0 || self.tol_eig.is_nan() {
            return Err(Error::InvalidSweep("tol_eig must be positive".into()));
        }
        if self.degeneracy_factor <= 0.0 || self.degeneracy_factor.is_nan() {
            return Err(Error::InvalidSweep(
                "degeneracy_factor must be positive".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.trim_fraction) {
            return Err(Error::InvalidSweep(
                "trim_fraction must lie in [0, 0.5)".into(),
            ));
        }
        if self.prominence <= 0.0 || self.prominence.is_nan() {
            return Err(Error::InvalidSweep("prominence must be positive".into()));
        }
        Ok(())
    }

    /// Decision thresholds for a chain of `sites` sites, honoring overrides.
    pub fn thresholds_for(&self, sites: usize) -> Thresholds {
        let d = Thresholds::for_size(sites);
        Thresholds {
            eta_ipr: self.eta_ipr.unwrap_or(d.eta_ipr),
            eta_npr: self.eta_npr.unwrap_or(d.eta_npr),
        }
    }
}

/// One grid point of a sweep table. Metrics that were not computed (winding
/// off, derivative undefined, failed point) hold NaN.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub axis: f64,
    pub mu_raw: f64,
    pub mu_calibrated: f64,
    pub abs_e_edge: f64,
    pub ipr_bulk: f64,
    pub npr_bulk: f64,
    pub ipr_edge: f64,
    pub npr_edge: f64,
    /// d(npr_edge)/d(axis), filled after the whole grid is available.
    pub dnpr_edge: f64,
    /// `None` when the point failed to decompose, localization was not
    /// computed, or the spectrum was flagged near-defective (classification
    /// is withheld there rather than guessed).
    pub regime: Option<Regime>,
    /// Diagnostic tokens: `near_defective`, `edge_tie`, `occupied_cut_tie`,
    /// `winding_im_large`, `solver_error:<message>`.
    pub flags: Vec<String>,
}

/// Per-state record for spectrum dumps.
#[derive(Clone, Debug)]
pub struct SpectrumRow {
    pub index: usize,
    pub re_e: f64,
    pub im_e: f64,
    pub abs_e: f64,
    pub residual: f64,
    pub ipr: f64,
    pub npr: f64,
    pub is_edge: bool,
}

/// Sweep results as an ordered table.
#[derive(Clone, Debug, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Shortest-roundtrip float for CSV cells; non-finite values print as
/// `nan`/`inf`/`-inf`.
pub fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "axis,mu_raw,mu_calibrated,absE_edge,ipr_bulk,npr_bulk,ipr_edge,npr_edge,dnpr_edge,regime,flags";

impl SweepTable {
    /// CSV rendering with the fixed column set. The regime cell is empty on
    /// failed points; flag tokens are `;`-joined and sanitized so the cell
    /// never needs quoting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let regime = r.regime.map(|g| g.to_string()).unwrap_or_default();
            let flags = r
                .flags
                .iter()
                .map(|f| f.replace([',', '\n', '"'], " "))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_float(r.axis),
                csv_float(r.mu_raw),
                csv_float(r.mu_calibrated),
                csv_float(r.abs_e_edge),
                csv_float(r.ipr_bulk),
                csv_float(r.npr_bulk),
                csv_float(r.ipr_edge),
                csv_float(r.npr_edge),
                csv_float(r.dnpr_edge),
                regime,
                flags,
            ));
        }
        out
    }
}

/// A completed sweep: the table plus optional per-point spectra and
/// snapshot profiles.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub table: SweepTable,
    /// (grid value, spectrum) per point when `spectrum_dump` was set.
    pub spectra: Vec<(f64, Vec<SpectrumRow>)>,
    /// (grid value, bulk-state profiles) at each requested snapshot point.
    pub snapshots: Vec<(f64, Vec<StateProfile>)>,
}

fn failed_row(x: f64, err: &Error) -> SweepRow {
    SweepRow {
        axis: x,
        mu_raw: f64::NAN,
        mu_calibrated: f64::NAN,
        abs_e_edge: f64::NAN,
        ipr_bulk: f64::NAN,
        npr_bulk: f64::NAN,
        ipr_edge: f64::NAN,
        npr_edge: f64::NAN,
        dnpr_edge: f64::NAN,
        regime: None,
        flags: vec![format!("solver_error:{err}")],
    }
}

fn spectrum_rows(eig: &EigenSystem, ipr: &[f64], npr: &[f64], edge: &[usize; 2]) -> Vec<SpectrumRow> {
    (0..eig.dim())
        .map(|k| SpectrumRow {
            index: k,
            re_e: eig.eigenvalues[k].re,
            im_e: eig.eigenvalues[k].im,
            abs_e: eig.eigenvalues[k].norm(),
            residual: eig.residual_norms[k],
            ipr: ipr[k],
            npr: npr[k],
            is_edge: edge.contains(&k),
        })
        .collect()
}

struct PointOutcome {
    row: SweepRow,
    spectrum: Option<Vec<SpectrumRow>>,
    profiles: Option<Vec<StateProfile>>,
}

fn sweep_point(spec: &SweepSpec, settings: &RunSettings, x: f64, snapshot: bool) -> PointOutcome {
    let run = || -> Result<PointOutcome> {
        let params = spec.params_at(x).validated()?;
        let h = build_hamiltonian(&params)?;
        let c = &spec.compute;
        let eig = if c.winding {
            eigendecompose(&h, settings.tol_eig)?
        } else {
            eigendecompose_right_only(&h, settings.tol_eig)?
        };
        let deg_tol = settings.degeneracy_factor * eig.h_norm;

        let mut flags = Vec::new();
        let near_defective = !eig.warnings.is_empty();
        if near_defective {
            flags.push("near_defective".to_string());
        }

        let mut abs_e_edge = f64::NAN;
        let mut ipr_bulk = f64::NAN;
        let mut npr_bulk = f64::NAN;
        let mut ipr_edge = f64::NAN;
        let mut npr_edge = f64::NAN;
        let mut regime = None;
        let mut per_state: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut edge_pair: Option<[usize; 2]> = None;

        if c.localization {
            let report = aggregate(&eig, &settings.thresholds_for(eig.dim()), deg_tol)?;
            if report.tie_at_cut {
                flags.push("edge_tie".to_string());
            }
            ipr_bulk = report.ipr_bulk;
            npr_bulk = report.npr_bulk;
            if c.edge {
                abs_e_edge = report.abs_e_edge;
                ipr_edge = report.ipr_edge;
                npr_edge = report.npr_edge;
            }
            // A near-defective decomposition gets no regime label: the point
            // stays in the table with its diagnostics instead of a guess.
            if !near_defective {
                regime = Some(report.regime);
            }
            edge_pair = Some(report.edge);
            per_state = Some((report.ipr, report.npr));
        } else if c.edge || c.spectrum_dump || snapshot {
            let split = split_edge_bulk(&eig, deg_tol)?;
            if split.tie_at_cut {
                flags.push("edge_tie".to_string());
            }
            if c.edge {
                abs_e_edge = 0.5
                    * (eig.eigenvalues[split.edge[0]].norm()
                        + eig.eigenvalues[split.edge[1]].norm());
            }
            edge_pair = Some(split.edge);
        }

        let (mu_raw, mu_calibrated) = if c.winding {
            let cfg = WindingConfig {
                trim_fraction: settings.trim_fraction,
                occupied_rule: OccupiedRule::LowerRealHalf,
            };
            let rec = winding_number(&eig, &cfg, deg_tol)?;
            if rec.cut_tie {
                flags.push("occupied_cut_tie".to_string());
            }
            if rec.im_residual > WINDING_IM_TOL {
                flags.push("winding_im_large".to_string());
            }
            (rec.mu_raw, rec.mu_calibrated)
        } else {
            (f64::NAN, f64::NAN)
        };

        let spectrum = if c.spectrum_dump {
            let edge = edge_pair.expect("edge split present when dumping spectra");
            Some(match &per_state {
                Some((ipr, npr)) => spectrum_rows(&eig, ipr, npr, &edge),
                None => {
                    let nan = vec![f64::NAN; eig.dim()];
                    spectrum_rows(&eig, &nan, &nan, &edge)
                }
            })
        } else {
            None
        };
        let profiles = if snapshot {
            let edge = edge_pair.expect("edge split present when capturing profiles");
            let keep: Vec<usize> = (0..eig.dim()).filter(|k| !edge.contains(k)).collect();
            Some(state_profiles(&eig, &keep)?)
        } else {
            None
        };

        Ok(PointOutcome {
            row: SweepRow {
                axis: x,
                mu_raw,
                mu_calibrated,
                abs_e_edge,
                ipr_bulk,
                npr_bulk,
                ipr_edge,
                npr_edge,
                dnpr_edge: f64::NAN,
                regime,
                flags,
            },
            spectrum,
            profiles,
        })
    };
    run().unwrap_or_else(|err| PointOutcome {
        row: failed_row(x, &err),
        spectrum: None,
        profiles: None,
    })
}

/// Grid indices nearest each requested snapshot position, deduplicated.
fn snapshot_indices(grid: &[f64], at: &[f64]) -> Result<BTreeSet<usize>> {
    let mut idx = BTreeSet::new();
    for &v in at {
        if !v.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "snapshot position {v} is not finite"
            )));
        }
        let nearest = (0..grid.len())
            .min_by(|&a, &b| (grid[a] - v).abs().total_cmp(&(grid[b] - v).abs()))
            .expect("grid is non-empty");
        idx.insert(nearest);
    }
    Ok(idx)
}

/// Runs the sweep over its grid, in parallel across points. Grid order is
/// preserved and the result is deterministic for fixed inputs.
pub fn run_sweep(spec: &SweepSpec, settings: &RunSettings) -> Result<SweepOutput> {
    settings.validated()?;
    spec.base.clone().validated()?;
    let grid = spec.grid()?;
    let snap_at = snapshot_indices(&grid, &spec.compute.snapshots_at)?;

    let points: Vec<PointOutcome> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &x)| sweep_point(spec, settings, x, snap_at.contains(&i)))
        .collect();

    let mut rows = Vec::with_capacity(points.len());
    let mut spectra = Vec::new();
    let mut snapshots = Vec::new();
    for p in points {
        if let Some(s) = p.spectrum {
            spectra.push((p.row.axis, s));
        }
        if let Some(pr) = p.profiles {
            snapshots.push((p.row.axis, pr));
        }
        rows.push(p.row);
    }

    if rows.len() >= 3 && spec.compute.localization && spec.compute.edge {
        let ys: Vec<f64> = rows.iter().map(|r| r.npr_edge).collect();
        let d = derivative(&grid, &ys)?;
        for (row, di) in rows.iter_mut().zip(d) {
            row.dnpr_edge = di;
        }
    }
    Ok(SweepOutput {
        table: SweepTable { rows },
        spectra,
        snapshots,
    })
}

/// Second-order finite-difference derivative on a uniform grid: central
/// differences inside, one-sided three-point stencils at the ends.
pub fn derivative(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::InvalidSweep(format!(
            "derivative input lengths differ: {} vs {}",
            n,
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::TooFew { need: 3, got: n });
    }
    let h = x[1] - x[0];
    if h <= 0.0 || h.is_nan() {
        return Err(Error::NonUniformGrid);
    }
    let scale = h.abs().max(x[n - 1].abs()).max(x[0].abs());
    for w in x.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * scale {
            return Err(Error::NonUniformGrid);
        }
    }
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h));
    for i in 1..n - 1 {
        d.push((y[i + 1] - y[i - 1]) / (2.0 * h));
    }
    d.push((3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h));
    Ok(d)
}

/// A detected transition: a prominent local maximum of |derivative|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub index: usize,
    /// Grid value at the peak.
    pub x: f64,
    /// Peak height in units of the median |derivative| (∞ if that median
    /// is zero).
    pub strength: f64,
}

/// Finds local maxima of |d| at least `prominence` times the median |d|.
/// Adjacent candidates are merged, keeping the higher one; grid endpoints
/// can qualify (one-sided maxima).
pub fn detect_transitions(x: &[f64], d: &[f64], prominence: f64) -> Result<Vec<Transition>> {
    let n = x.len();
    if d.len() != n {
        return Err(Error::InvalidSweep(format!(
            "transition input lengths differ: {} vs {}",
            n,
            d.len()
        )));
    }
    if n < 3 {
        return Err(Error::TooFew { need: 3, got: n });
    }
    if prominence <= 0.0 || prominence.is_nan() {
        return Err(Error::InvalidSweep("prominence must be positive".into()));
    }
    let a: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let max = a.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return Ok(Vec::new());
    }
    let mut sorted = a.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let threshold = prominence * median;

    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || a[i] >= a[i - 1];
            let right_ok = i == n - 1 || a[i] >= a[i + 1];
            a[i] > 0.0 && a[i] >= threshold && left_ok && right_ok
        })
        .collect();

    // merge plateau/adjacent peaks, keeping the higher sample
    let mut merged: Vec<usize> = Vec::new();
    candidates.sort_unstable();
    for i in candidates {
        match merged.last() {
            Some(&prev) if i - prev <= 1 => {
                if a[i] > a[prev] {
                    *merged.last_mut().unwrap() = i;
                }
            }
            _ => merged.push(i),
        }
    }
    Ok(merged
        .into_iter()
        .map(|i| Transition {
            index: i,
            x: x[i],
            strength: if median > 0.0 { a[i] / median } else { f64::INFINITY },
        })
        .collect())
}

/// Bulk metrics of one parameter point measured across chain sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssRecord {
    /// Sites L.
    pub sites: usize,
    pub ipr_bulk: f64,
    pub npr_bulk: f64,
}

/// Re-measures `base` (its `n_cells` is ignored) at each chain size in
/// `sizes` (site counts; even, ≥ 4, strictly ascending).
pub fn finite_size_scan(
    base: &ModelParams,
    sizes: &[usize],
    settings: &RunSettings,
) -> Result<Vec<FssRecord>> {
    settings.validated()?;
    if sizes.is_empty() {
        return Err(Error::InvalidSizes("no sizes given".into()));
    }
    for w in sizes.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidSizes(format!(
                "sizes must be strictly ascending, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    for &l in sizes {
        if l % 2 != 0 {
            return Err(Error::InvalidSizes(format!(
                "chain sizes count sites of two-site cells and must be even, got {l}"
            )));
        }
        if l < 4 {
            return Err(Error::InvalidSizes(format!("size {l} is below 4 sites")));
        }
    }
    sizes
        .iter()
        .map(|&l| {
            let mut p = base.clone();
            p.n_cells = l / 2;
            let eig = eigendecompose_right_only(&build_hamiltonian(&p.validated()?)?, settings.tol_eig)?;
            let report = aggregate(
                &eig,
                &settings.thresholds_for(l),
                settings.degeneracy_factor * eig.h_norm,
            )?;
            Ok(FssRecord {
                sites: l,
                ipr_bulk: report.ipr_bulk,
                npr_bulk: report.npr_bulk,
            })
        })
        .collect()
}

/// Which states a snapshot keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[serde(rename = "all_states")]
    All,
    /// Everything except the two smallest-|E| states.
    BulkOnly,
    /// The `n` smallest-|E| states.
    #[serde(rename = "lowest_abs_energy")]
    LowestAbs(usize),
}

/// One state's energy, participation metrics, and per-site weights |ψᵢ|².
#[derive(Clone, Debug)]
pub struct StateProfile {
    /// Index in eigenvalue order.
    pub state: usize,
    pub re_e: f64,
    pub im_e: f64,
    pub ipr: f64,
    pub npr: f64,
    pub weights: Vec<f64>,
}

/// Decomposes one parameter point and extracts per-site weights for the
/// selected states.
pub fn snapshot(
    params: &ModelParams,
    selection: Selection,
    settings: &RunSettings,
) -> Result<Vec<StateProfile>> {
    settings.validated()?;
    let p = params.clone().validated()?;
    let eig = eigendecompose_right_only(&build_hamiltonian(&p)?, settings.tol_eig)?;
    let deg_tol = settings.degeneracy_factor * eig.h_norm;
    let split = split_edge_bulk(&eig, deg_tol)?;
    let keep: Vec<usize> = match selection {
        Selection::All => (0..eig.dim()).collect(),
        Selection::BulkOnly => split.bulk.clone(),
        Selection::LowestAbs(n) => {
            if n == 0 || n > eig.dim() {
                return Err(Error::InvalidParams(format!(
                    "snapshot selection of {n} states out of {}",
                    eig.dim()
                )));
            }
            let mut order: Vec<usize> = (0..eig.dim()).collect();
            order.sort_by(|&i, &j| {
                eig.eigenvalues[i]
                    .norm()
                    .total_cmp(&eig.eigenvalues[j].norm())
                    .then(i.cmp(&j))
            });
            let mut keep = order[..n].to_vec();
            keep.sort_unstable();
            keep
        }
    };
    state_profiles(&eig, &keep)
}

fn state_profiles(eig: &EigenSystem, keep: &[usize]) -> Result<Vec<StateProfile>> {
    keep.iter()
        .map(|&k| {
            let v = eig.right.col(k);
            let ipr = crate::localization::ipr_state(v)?;
            Ok(StateProfile {
                state: k,
                re_e: eig.eigenvalues[k].re,
                im_e: eig.eigenvalues[k].im,
                ipr,
                npr: 1.0 / (eig.dim() as f64 * ipr),
                weights: v.iter().map(|z| z.norm_sqr()).collect(),
            })
        })
        .collect()
}
