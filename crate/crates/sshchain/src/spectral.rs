//! Biorthogonal eigendecomposition of the chain Hamiltonian.
//!
//! The decomposition solves H|Rₙ⟩ = Eₙ|Rₙ⟩ with a dense QR eigensolver and
//! derives the left family H†|Lₙ⟩ = Eₙ*|Lₙ⟩ from the complex-symmetric
//! structure: for H = Hᵀ the conjugate of a right eigenvector is a left one,
//! so biorthonormalization reduces to a diagonal rescale plus a small Gram
//! correction inside (near-)degenerate clusters. Right vectors carry unit
//! Euclidean norm; left vectors absorb the biorthogonality scale.

use num_complex::Complex64;

use crate::backend;
use crate::error::{Error, Result};
use crate::mat::ColMat;
use crate::model::Hamiltonian;

/// Default relative residual tolerance for accepting an eigenpair.
pub const DEFAULT_TOL_EIG: f64 = 1e-8;
/// Eigenvalue-cluster tolerance as a fraction of ‖H‖_∞.
pub const DEGENERACY_TOL_FACTOR: f64 = 1e-10;
/// Biorthogonality residual above which the spectrum is flagged near-defective.
pub const BIORTH_WARN_TOL: f64 = 1e-6;
/// Self-overlap |RₙᵀRₙ| (for unit-norm Rₙ) below which a state is flagged
/// near-defective. The self-overlap is the reciprocal eigenvector condition
/// number of a complex-symmetric matrix: it vanishes exactly at an
/// exceptional point, where the biorthogonality residual alone can stay
/// small even though the left vectors blow up as 1/|RᵀR|.
pub const SELF_ORTHOGONAL_TOL: f64 = 1e-6;

/// Which key the eigenvalue ordering follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingTag {
    /// Ascending Re(E), ties by Im(E), then original solver index.
    ByRealPart,
    /// Ascending |E|, ties by original index.
    ByAbsEnergy,
}

/// Non-fatal diagnostics attached to a decomposition.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralWarning {
    /// Biorthogonalization is ill-conditioned near an exceptional point;
    /// `pair` names the offending states and `residual` the worst overlap
    /// defect.
    NearDefective { pair: (usize, usize), residual: f64 },
}

impl std::fmt::Display for SpectralWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectralWarning::NearDefective { pair, residual } => write!(
                f,
                "near-defective spectrum: states {} and {} (residual {:.3e})",
                pair.0, pair.1, residual
            ),
        }
    }
}

/// Complete spectrum with biorthonormalized eigenvector pairs.
///
/// `left` and `biorth_error` are `None` when the decomposition was run
/// right-only (localization metrics need no left vectors).
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    /// Column n is the unit-norm right eigenvector |Rₙ⟩.
    pub right: ColMat,
    /// Column n is the left eigenvector |Lₙ⟩ with ⟨Lₘ|Rₙ⟩ = δₘₙ.
    pub left: Option<ColMat>,
    /// ‖H·Rₙ − Eₙ·Rₙ‖₂ / ‖H‖_∞ per state.
    pub residual_norms: Vec<f64>,
    /// max |⟨Lₘ|Rₙ⟩ − δₘₙ| after normalization.
    pub biorth_error: Option<f64>,
    pub ordering: OrderingTag,
    pub warnings: Vec<SpectralWarning>,
    /// ‖H‖_∞ of the decomposed operator (scale for downstream tolerances).
    pub h_norm: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Full decomposition: right + left vectors, residual checks, biorthogonality
/// diagnostics. Eigenvalues are returned in `ByRealPart` order.
pub fn eigendecompose(h: &Hamiltonian, tol_eig: f64) -> Result<EigenSystem> {
    eigendecompose_with(h, tol_eig, None, true)
}

/// Decomposition without left vectors; cheaper when only right-vector
/// metrics are needed.
pub fn eigendecompose_right_only(h: &Hamiltonian, tol_eig: f64) -> Result<EigenSystem> {
    eigendecompose_with(h, tol_eig, None, false)
}

/// As [`eigendecompose`], with an explicit degeneracy tolerance
/// (default `DEGENERACY_TOL_FACTOR`·‖H‖_∞).
pub fn eigendecompose_with(
    h: &Hamiltonian,
    tol_eig: f64,
    degeneracy_tol: Option<f64>,
    with_left: bool,
) -> Result<EigenSystem> {
    if tol_eig <= 0.0 {
        return Err(Error::InvalidParams("tol_eig must be positive".into()));
    }
    let n = h.dim();
    let h_norm = h.infinity_norm();
    let deg_tol = degeneracy_tol.unwrap_or(DEGENERACY_TOL_FACTOR * h_norm);

    let mut a = h.to_col_major();
    let (w, vr) = backend::zgeev(n, &mut a)?;
    drop(a);

    // ByRealPart order with deterministic tie-breaks
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w[i].re
            .total_cmp(&w[j].re)
            .then(w[i].im.total_cmp(&w[j].im))
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| w[i]).collect();
    let mut right = ColMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = &vr[src * n..(src + 1) * n];
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dst_col = right.col_mut(dst);
        for (d, &z) in dst_col.iter_mut().zip(col) {
            *d = z / norm;
        }
    }
    drop(vr);

    // residuals via the band structure
    let mut hv = vec![Complex64::ZERO; n];
    let mut residual_norms = Vec::with_capacity(n);
    for (k, &e) in eigenvalues.iter().enumerate() {
        let v = right.col(k);
        h.apply(v, &mut hv);
        let r2: f64 = hv
            .iter()
            .zip(v)
            .map(|(y, x)| (y - e * x).norm_sqr())
            .sum();
        residual_norms.push(r2.sqrt() / h_norm);
    }
    let bad: Vec<usize> = (0..n).filter(|&k| residual_norms[k] > tol_eig).collect();
    if !bad.is_empty() {
        let max = bad
            .iter()
            .map(|&k| residual_norms[k])
            .fold(0.0, f64::max);
        return Err(Error::ResidualTolerance {
            tol: tol_eig,
            max,
            indices: bad,
        });
    }

    let (left, biorth_error, warnings) = if with_left {
        let (l, e, warn) = left_from_right(&eigenvalues, &right, deg_tol);
        (Some(l), Some(e), warn)
    } else {
        (None, None, Vec::new())
    };

    Ok(EigenSystem {
        eigenvalues,
        right,
        left,
        residual_norms,
        biorth_error,
        ordering: OrderingTag::ByRealPart,
        warnings,
        h_norm,
    })
}

/// Left eigenvectors from the conjugation shortcut for complex-symmetric H:
/// Lₙ = conj(Rₙ)/conj(RₙᵀRₙ), with a Gram-matrix correction replacing the
/// diagonal rescale inside eigenvalue clusters closer than `degeneracy_tol`
/// (that small solve is the independent left-eigenproblem restricted to the
/// cluster; overlaps across distinct eigenvalues vanish by symmetry).
/// Returns (left vectors, biorthogonality error, warnings).
pub fn left_from_right(
    eigenvalues: &[Complex64],
    right: &ColMat,
    degeneracy_tol: f64,
) -> (ColMat, f64, Vec<SpectralWarning>) {
    let n = eigenvalues.len();
    let mut left = ColMat::zeros(n, n);
    let mut warnings = Vec::new();

    let clusters = degenerate_clusters(eigenvalues, degeneracy_tol);
    let mut in_cluster = vec![false; n];
    for c in &clusters {
        for &i in c {
            in_cluster[i] = true;
        }
    }

    // singletons: diagonal rescale by the complex self-overlap
    for (k, &clustered) in in_cluster.iter().enumerate() {
        if clustered {
            continue;
        }
        let r = right.col(k);
        let s: Complex64 = r.iter().map(|z| z * z).sum();
        if s.norm() < SELF_ORTHOGONAL_TOL {
            warnings.push(SpectralWarning::NearDefective {
                pair: (k, nearest_state(eigenvalues, k)),
                residual: s.norm(),
            });
        }
        let scale = if s.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            s.conj().inv()
        };
        let dst = left.col_mut(k);
        for (d, &z) in dst.iter_mut().zip(r) {
            *d = z.conj() * scale;
        }
    }

    // clusters: L_c = conj(R_c · G⁻¹) with G_ab = R_aᵀ R_b (symmetric)
    for c in &clusters {
        let k = c.len();
        let mut g = vec![Complex64::ZERO; k * k];
        for a in 0..k {
            for b in a..k {
                let s: Complex64 = right
                    .col(c[a])
                    .iter()
                    .zip(right.col(c[b]))
                    .map(|(x, y)| x * y)
                    .sum();
                g[a + b * k] = s;
                g[b + a * k] = s;
            }
        }
        match invert_small(&mut g, k) {
            Some(ginv) => {
                // G entries are O(1) for a well-conditioned cluster of
                // unit-norm vectors, so a huge inverse marks the same
                // near-defectiveness the singleton self-overlap test catches.
                let worst = ginv.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if worst > 1.0 / SELF_ORTHOGONAL_TOL {
                    warnings.push(SpectralWarning::NearDefective {
                        pair: (c[0], c[1]),
                        residual: 1.0 / worst,
                    });
                }
                for (a, &col_idx) in c.iter().enumerate() {
                    let mut acc = vec![Complex64::ZERO; n];
                    for (b, &rb) in c.iter().enumerate() {
                        let coeff = ginv[b + a * k];
                        for (acc_i, &r_i) in acc.iter_mut().zip(right.col(rb)) {
                            *acc_i += r_i * coeff;
                        }
                    }
                    let dst = left.col_mut(col_idx);
                    for (d, z) in dst.iter_mut().zip(acc) {
                        *d = z.conj();
                    }
                }
            }
            None => {
                // defective cluster: keep the raw conjugates and flag it
                warnings.push(SpectralWarning::NearDefective {
                    pair: (c[0], c[1]),
                    residual: f64::INFINITY,
                });
                for &idx in c {
                    let src: Vec<Complex64> =
                        right.col(idx).iter().map(|z| z.conj()).collect();
                    left.col_mut(idx).copy_from_slice(&src);
                }
            }
        }
    }

    // biorthogonality defect: max |L†R − I|
    let mut gram = vec![Complex64::ZERO; n * n];
    backend::zgemm(
        b'C',
        b'N',
        n,
        n,
        n,
        left.data(),
        n,
        right.data(),
        n,
        &mut gram,
        n,
    );
    let mut biorth_error = 0.0f64;
    let mut worst = (0usize, 0usize);
    for j in 0..n {
        for i in 0..n {
            let mut d = gram[i + j * n];
            if i == j {
                d -= 1.0;
            }
            let m = d.norm();
            if m > biorth_error {
                biorth_error = m;
                worst = (i, j);
            }
        }
    }
    if biorth_error > BIORTH_WARN_TOL {
        warnings.push(SpectralWarning::NearDefective {
            pair: worst,
            residual: biorth_error,
        });
    }
    (left, biorth_error, warnings)
}

/// Groups of eigenvalue indices mutually connected by |Eᵢ − Eⱼ| < tol.
fn degenerate_clusters(eigenvalues: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = eigenvalues.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() < tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

fn nearest_state(eigenvalues: &[Complex64], k: usize) -> usize {
    let mut best = (f64::INFINITY, k);
    for (i, &e) in eigenvalues.iter().enumerate() {
        if i != k {
            let d = (e - eigenvalues[k]).norm();
            if d < best.0 {
                best = (d, i);
            }
        }
    }
    best.1
}

/// In-place Gauss-Jordan inverse of a small k×k column-major matrix;
/// `None` when a pivot collapses (singular to machine precision).
fn invert_small(g: &mut [Complex64], k: usize) -> Option<Vec<Complex64>> {
    let mut inv = vec![Complex64::ZERO; k * k];
    for i in 0..k {
        inv[i + i * k] = Complex64::new(1.0, 0.0);
    }
    let scale: f64 = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&a, &b| g[a + col * k].norm().total_cmp(&g[b + col * k].norm()))?;
        if g[pivot_row + col * k].norm() < 1e-14 * scale.max(1e-300) {
            return None;
        }
        if pivot_row != col {
            for j in 0..k {
                g.swap(col + j * k, pivot_row + j * k);
                inv.swap(col + j * k, pivot_row + j * k);
            }
        }
        let p = g[col + col * k];
        for j in 0..k {
            g[col + j * k] /= p;
            inv[col + j * k] /= p;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let f = g[row + col * k];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..k {
                let gc = g[col + j * k];
                let ic = inv[col + j * k];
                g[row + j * k] -= f * gc;
                inv[row + j * k] -= f * ic;
            }
        }
    }
    Some(inv)
}

/// Indices of the two smallest-|E| states (the edge pair) and the remaining
/// bulk, each ascending in the `ByRealPart` index order.
#[derive(Clone, Debug)]
pub struct EdgeBulkSplit {
    pub edge: [usize; 2],
    pub bulk: Vec<usize>,
    /// |E| tie at the edge/bulk cut within the degeneracy tolerance; the
    /// split stays deterministic via the original-index tie-break.
    pub tie_at_cut: bool,
}

pub fn split_edge_bulk(eig: &EigenSystem, degeneracy_tol: f64) -> Result<EdgeBulkSplit> {
    let n = eig.dim();
    if n < 4 {
        return Err(Error::TooFew { need: 4, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .norm()
            .total_cmp(&eig.eigenvalues[j].norm())
            .then(i.cmp(&j))
    });
    let mut edge = [order[0], order[1]];
    edge.sort_unstable();
    let tie_at_cut = (eig.eigenvalues[order[1]].norm() - eig.eigenvalues[order[2]].norm()).abs()
        < degeneracy_tol;
    let mut bulk: Vec<usize> = order[2..].to_vec();
    bulk.sort_unstable();
    Ok(EdgeBulkSplit {
        edge,
        bulk,
        tie_at_cut,
    })
}
