//! Real-space winding number under open boundary conditions.
//!
//! The invariant is built from the biorthogonal projector onto the occupied
//! half of the spectrum, P = Σ_{n∈occ}|Rₙ⟩⟨Lₙ|, flattened against the chiral
//! operator into Q with Q_ij = (1 − cᵢcⱼ)P_ij. The winding is the trimmed
//! trace of the chiral-weighted commutator of Q with the cell-coordinate
//! operator X,
//!
//!   μ_raw = (1/2L′) Σ_{i∈mid} cᵢ Σ_j Q_ij Q_ji (xᵢ − xⱼ),
//!
//! where `mid` drops a fraction of sites at each end to suppress boundary
//! contributions and L′ counts the sites kept. On the clean topological
//! chain μ_raw converges to 1/2, so the reported invariant is rescaled by
//! [`WINDING_CALIBRATION`] to land on the integer values 0 and 1.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::backend;
use crate::error::{Error, Result};
use crate::mat::ColMat;
use crate::model::chiral_operator;
use crate::spectral::{EigenSystem, OrderingTag};

/// Rescale from the trimmed-trace value to integer plateaus (clean
/// topological chain: μ_raw = 1/2 exactly in the large-L limit).
pub const WINDING_CALIBRATION: f64 = 2.0;

/// Imaginary part of μ_raw above this marks the result unreliable.
pub const WINDING_IM_TOL: f64 = 1e-6;

/// How the occupied half of a spectrum without a real line gap is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupiedRule {
    /// The L/2 eigenvalues with smallest Re(E), ties by Im(E) then solver
    /// index (the chiral symmetry maps this set onto its complement).
    LowerRealHalf,
}

impl std::fmt::Display for OccupiedRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OccupiedRule::LowerRealHalf => "lower_real_half",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingConfig {
    /// Fraction of sites dropped at each chain end before tracing.
    pub trim_fraction: f64,
    pub occupied_rule: OccupiedRule,
}

impl Default for WindingConfig {
    fn default() -> Self {
        WindingConfig {
            trim_fraction: 0.2,
            occupied_rule: OccupiedRule::LowerRealHalf,
        }
    }
}

/// Winding measurement with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingRecord {
    /// Trimmed-trace value (plateaus at 0 and 1/2).
    pub mu_raw: f64,
    /// `WINDING_CALIBRATION` · μ_raw (plateaus at 0 and 1).
    pub mu_calibrated: f64,
    /// |Im| of the trace before taking the real part.
    pub im_residual: f64,
    pub trim_fraction: f64,
    pub occupied_rule: OccupiedRule,
    /// Eigenvalues straddling the occupied/empty cut were degenerate within
    /// tolerance; the occupied set is still deterministic (index tie-break)
    /// and μ is invariant under exchanging the tied pair.
    pub cut_tie: bool,
}

/// Cell coordinate per site: both sites of cell k (1-based) sit at x = k.
pub fn coordinate_operator(n_cells: usize) -> Vec<f64> {
    (0..2 * n_cells).map(|i| (i / 2 + 1) as f64).collect()
}

/// The flattened projector Q = P − CPC with P the occupied-half biorthogonal
/// projector, plus whether the occupied cut hit a degeneracy.
pub fn build_q(eig: &EigenSystem, degeneracy_tol: f64) -> Result<(ColMat, bool)> {
    let n = eig.dim();
    if eig.ordering != OrderingTag::ByRealPart {
        return Err(Error::InvalidWinding(
            "occupied set needs eigenvalues ordered by real part".into(),
        ));
    }
    let left = eig.left.as_ref().ok_or_else(|| {
        Error::InvalidWinding("left eigenvectors required; run a full decomposition".into())
    })?;
    let k = n / 2;
    if k == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidWinding(format!(
            "need an even dimension with a half-filled spectrum, got L = {n}"
        )));
    }
    let cut_tie = (eig.eigenvalues[k - 1] - eig.eigenvalues[k]).norm() < degeneracy_tol;

    // occupied states are the first k columns in ByRealPart order
    let mut p = vec![Complex64::ZERO; n * n];
    backend::zgemm(
        b'N',
        b'C',
        n,
        n,
        k,
        &eig.right.data()[..n * k],
        n,
        &left.data()[..n * k],
        n,
        &mut p,
        n,
    );
    let chiral = chiral_operator(n)?;
    let c = chiral.signs();
    for j in 0..n {
        for i in 0..n {
            p[i + j * n] *= 1.0 - c[i] * c[j];
        }
    }
    Ok((ColMat::from_col_major(n, n, p), cut_tie))
}

/// Real-space winding number of a decomposed chain.
pub fn winding_number(
    eig: &EigenSystem,
    config: &WindingConfig,
    degeneracy_tol: f64,
) -> Result<WindingRecord> {
    if !(0.0..0.5).contains(&config.trim_fraction) {
        return Err(Error::InvalidWinding(format!(
            "trim fraction must lie in [0, 0.5), got {}",
            config.trim_fraction
        )));
    }
    let n = eig.dim();
    let (q, cut_tie) = build_q(eig, degeneracy_tol)?;
    let trim = (config.trim_fraction * n as f64).round() as usize;
    if 2 * trim >= n {
        return Err(Error::InvalidWinding(format!(
            "trim of {trim} sites per end leaves no interior on L = {n}"
        )));
    }
    let mid = trim..n - trim;
    let l_prime = (n - 2 * trim) as f64;

    let x = coordinate_operator(n / 2);
    let chiral = chiral_operator(n)?;
    let c = chiral.signs();
    let qd = q.data();
    let mut total = Complex64::ZERO;
    for i in mid {
        // Σ_j Q_ij Q_ji (x_i − x_j)
        let mut row = Complex64::ZERO;
        for j in 0..n {
            let b = qd[i + j * n] * qd[j + i * n];
            row += b * (x[i] - x[j]);
        }
        total += row * c[i];
    }
    let mu = total / (2.0 * l_prime);
    Ok(WindingRecord {
        mu_raw: mu.re,
        mu_calibrated: WINDING_CALIBRATION * mu.re,
        im_residual: mu.im.abs(),
        trim_fraction: config.trim_fraction,
        occupied_rule: config.occupied_rule,
        cut_tie,
    })
}
