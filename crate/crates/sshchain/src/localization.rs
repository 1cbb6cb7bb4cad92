//! Participation-ratio metrics and localization-regime classification.
//!
//! For a normalized state |ψ⟩ on L sites the inverse participation ratio
//! IPR = Σᵢ|ψᵢ|⁴ approaches 1/L for extended states and O(1) for localized
//! ones; the normalized participation ratio NPR = 1/(L·IPR) moves the other
//! way. Spectrum-averaged values of both, compared against size-dependent
//! thresholds, separate extended, localized, and coexisting regimes. The two
//! smallest-|E| states (the edge pair under open boundaries) are averaged
//! separately from the bulk so edge localization can be tracked on its own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{split_edge_bulk, EigenSystem};

use num_complex::Complex64;

/// IPR of a state (any nonzero normalization).
pub fn ipr_state(v: &[Complex64]) -> Result<f64> {
    let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n4: f64 = v.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum();
    Ok(n4 / (n2 * n2))
}

/// NPR of a state: 1/(L·IPR) with L = v.len().
pub fn npr_state(v: &[Complex64]) -> Result<f64> {
    Ok(1.0 / (v.len() as f64 * ipr_state(v)?))
}

/// Size-dependent decision thresholds for the spectrum-averaged metrics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Averaged IPR above this counts as "has localized weight".
    pub eta_ipr: f64,
    /// Averaged NPR above this counts as "has extended weight".
    pub eta_npr: f64,
}

impl Thresholds {
    /// Defaults for a chain of `sites` sites: η_IPR = max(5/L, 10⁻³) and
    /// η_NPR = max(8/L, 10⁻³). The NPR threshold sits higher because fully
    /// localized spectra floor out at NPR·L ≈ 5–7 (a handful of sites always
    /// participates), so a 5/L cut cannot separate them from critical
    /// spectra; 8/L clears that floor with margin at every size we run.
    pub fn for_size(sites: usize) -> Self {
        let l = sites as f64;
        Thresholds {
            eta_ipr: (5.0 / l).max(1e-3),
            eta_npr: (8.0 / l).max(1e-3),
        }
    }

    pub fn custom(eta_ipr: f64, eta_npr: f64) -> Self {
        Thresholds { eta_ipr, eta_npr }
    }
}

/// Bulk localization regime from spectrum-averaged IPR and NPR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Low IPR, high NPR: every state spreads over the lattice.
    Extended,
    /// High IPR, low NPR: every state is confined.
    Localized,
    /// Both metrics above threshold: localized and extended states coexist
    /// (intermediate phase with a mobility edge).
    Coexisting,
    /// Both below threshold; metrics are inconclusive at this size.
    Indeterminate,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Extended => "extended",
            Regime::Localized => "localized",
            Regime::Coexisting => "coexisting",
            Regime::Indeterminate => "indeterminate",
        })
    }
}

pub fn classify_regime(ipr_avg: f64, npr_avg: f64, thresholds: &Thresholds) -> Regime {
    match (ipr_avg >= thresholds.eta_ipr, npr_avg >= thresholds.eta_npr) {
        (false, true) => Regime::Extended,
        (true, false) => Regime::Localized,
        (true, true) => Regime::Coexisting,
        (false, false) => Regime::Indeterminate,
    }
}

/// Per-state metrics plus bulk/edge averages and the regime call.
#[derive(Clone, Debug)]
pub struct LocalizationReport {
    /// IPR per state, in eigenvalue order.
    pub ipr: Vec<f64>,
    /// NPR per state, in eigenvalue order.
    pub npr: Vec<f64>,
    /// Mean IPR over the L−2 bulk states.
    pub ipr_bulk: f64,
    pub npr_bulk: f64,
    /// Mean IPR over the two smallest-|E| states.
    pub ipr_edge: f64,
    pub npr_edge: f64,
    /// Mean |E| of the edge pair.
    pub abs_e_edge: f64,
    /// Regime call from the bulk averages.
    pub regime: Regime,
    pub thresholds: Thresholds,
    /// Indices of the edge pair (ascending).
    pub edge: [usize; 2],
    /// The |E| edge/bulk cut was degenerate; averages may mix the pair.
    pub tie_at_cut: bool,
}

/// Computes per-state metrics from the right eigenvectors and aggregates
/// them into bulk/edge averages and a regime call.
pub fn aggregate(
    eig: &EigenSystem,
    thresholds: &Thresholds,
    degeneracy_tol: f64,
) -> Result<LocalizationReport> {
    let n = eig.dim();
    let split = split_edge_bulk(eig, degeneracy_tol)?;
    let mut ipr = Vec::with_capacity(n);
    let mut npr = Vec::with_capacity(n);
    for k in 0..n {
        let i = ipr_state(eig.right.col(k))?;
        ipr.push(i);
        npr.push(1.0 / (n as f64 * i));
    }
    let mean = |idx: &[usize], v: &[f64]| idx.iter().map(|&k| v[k]).sum::<f64>() / idx.len() as f64;
    let ipr_bulk = mean(&split.bulk, &ipr);
    let npr_bulk = mean(&split.bulk, &npr);
    let ipr_edge = mean(&split.edge, &ipr);
    let npr_edge = mean(&split.edge, &npr);
    let abs_e_edge = split
        .edge
        .iter()
        .map(|&k| eig.eigenvalues[k].norm())
        .sum::<f64>()
        / 2.0;
    Ok(LocalizationReport {
        ipr,
        npr,
        ipr_bulk,
        npr_bulk,
        ipr_edge,
        npr_edge,
        abs_e_edge,
        regime: classify_regime(ipr_bulk, npr_bulk, thresholds),
        thresholds: *thresholds,
        edge: split.edge,
        tie_at_cut: split.tie_at_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, ModelParams};
    use crate::spectral::{eigendecompose_right_only, DEFAULT_TOL_EIG};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn uniform_state_is_maximally_extended() {
        let v = vec![c(0.5); 4];
        assert_eq!(ipr_state(&v).unwrap(), 0.25);
        assert_eq!(npr_state(&v).unwrap(), 1.0);
    }

    #[test]
    fn single_site_state_is_maximally_localized() {
        let mut v = vec![c(0.0); 100];
        v[37] = c(1.0);
        assert_eq!(ipr_state(&v).unwrap(), 1.0);
        assert!((npr_state(&v).unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn two_site_state_and_scale_invariance() {
        let mut v = vec![c(0.0); 10];
        v[2] = c(1.0);
        v[7] = Complex64::new(0.0, 1.0);
        let base = ipr_state(&v).unwrap();
        assert!((base - 0.5).abs() < 1e-15);
        for z in v.iter_mut() {
            *z *= 7.3;
        }
        assert!((ipr_state(&v).unwrap() - base).abs() < 1e-15);
    }

    #[test]
    fn npr_ipr_product_identity() {
        let v: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let prod = npr_state(&v).unwrap() * ipr_state(&v).unwrap() * 64.0;
        assert!((prod - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ipr_bounds_and_permutation_invariance() {
        let v: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new(1.0 + (i as f64).sqrt(), -0.2 * i as f64))
            .collect();
        let i0 = ipr_state(&v).unwrap();
        assert!((1.0 / 32.0..=1.0).contains(&i0));
        let mut w = v.clone();
        w.reverse();
        w.swap(3, 17);
        // summation order changes, so equality only up to roundoff
        assert!((ipr_state(&w).unwrap() - i0).abs() < 1e-14);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(matches!(
            ipr_state(&[Complex64::ZERO; 8]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn threshold_floors() {
        let t = Thresholds::for_size(100);
        assert_eq!(t.eta_ipr, 0.05);
        assert_eq!(t.eta_npr, 0.08);
        let t = Thresholds::for_size(10_000);
        assert_eq!(t.eta_ipr, 1e-3);
        assert_eq!(t.eta_npr, 1e-3);
    }

    #[test]
    fn regime_truth_table() {
        let t = Thresholds::custom(0.01, 0.01);
        assert_eq!(classify_regime(0.001, 0.5, &t), Regime::Extended);
        assert_eq!(classify_regime(0.5, 0.001, &t), Regime::Localized);
        assert_eq!(classify_regime(0.1, 0.05, &t), Regime::Coexisting);
        assert_eq!(classify_regime(1e-4, 1e-4, &t), Regime::Indeterminate);
        // boundary values count as above-threshold
        assert_eq!(classify_regime(0.01, 0.01, &t), Regime::Coexisting);
    }

    #[test]
    fn regime_display_tokens() {
        assert_eq!(Regime::Extended.to_string(), "extended");
        assert_eq!(Regime::Coexisting.to_string(), "coexisting");
    }

    #[test]
    fn clean_chain_aggregates_as_extended() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 100).unwrap();
        let eig =
            eigendecompose_right_only(&build_hamiltonian(&p).unwrap(), DEFAULT_TOL_EIG).unwrap();
        let rep = aggregate(&eig, &Thresholds::for_size(200), 1e-10 * eig.h_norm).unwrap();
        assert_eq!(rep.regime, Regime::Extended);
        assert!(rep.ipr_bulk < 3.0 / 200.0, "ipr_bulk = {}", rep.ipr_bulk);
        assert!(rep.npr_bulk > 0.3, "npr_bulk = {}", rep.npr_bulk);
        assert_eq!(rep.ipr.len(), 200);
    }

    #[test]
    fn topological_edge_pair_is_localized() {
        let p = ModelParams::new(1.0, 1.5, 0.0, 0.0, 0.0, 100).unwrap();
        let eig =
            eigendecompose_right_only(&build_hamiltonian(&p).unwrap(), DEFAULT_TOL_EIG).unwrap();
        let rep = aggregate(&eig, &Thresholds::for_size(200), 1e-10 * eig.h_norm).unwrap();
        assert!(rep.abs_e_edge < 1e-6);
        assert!(rep.ipr_edge > 0.2, "ipr_edge = {}", rep.ipr_edge);
        assert!(rep.ipr_edge > 10.0 * rep.ipr_bulk);
        assert!(rep.npr_edge < rep.npr_bulk / 10.0);
    }
}
