//! Construction of the quasiperiodic non-Hermitian SSH chain.
//!
//! The chain has N unit cells of two sites (A, B) in the ordering
//! A₁,B₁,A₂,B₂,…; intracell bonds carry t₁ and intercell bonds carry t₂ plus
//! an incommensurate complex modulation W·cos(2πβk + iγ) that alternates in
//! strength (W₁ on odd intercell bonds, W₂ on even ones). The "+H.c." of the
//! hopping operators acts before multiplication by the complex cosine, so the
//! matrix is complex symmetric (H = Hᵀ) rather than Hermitian, and it
//! anticommutes with the alternating-sign chiral operator C.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::ColMat;

/// Default quasiperiodicity β = (√5 − 1)/2 (inverse golden ratio) at full
/// machine precision; kept irrational, not a rational approximant.
#[allow(clippy::excessive_precision)] // digits document the exact value
pub const INV_GOLDEN_RATIO: f64 = 0.618033988749894848;

fn default_beta() -> f64 {
    INV_GOLDEN_RATIO
}

/// Physical and lattice parameters of the chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Intracell hopping.
    pub t1: f64,
    /// Intercell hopping.
    pub t2: f64,
    /// Quasidisorder strength on odd intercell bonds.
    pub w1: f64,
    /// Quasidisorder strength on even intercell bonds.
    pub w2: f64,
    /// Non-Hermitian parameter (imaginary phase inside the cosine).
    pub gamma: f64,
    /// Quasiperiodicity; must lie in (0, 1).
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Number of unit cells N; the chain has L = 2N sites.
    pub n_cells: usize,
}

impl ModelParams {
    /// Parameters with the default β.
    pub fn new(t1: f64, t2: f64, w1: f64, w2: f64, gamma: f64, n_cells: usize) -> Result<Self> {
        Self {
            t1,
            t2,
            w1,
            w2,
            gamma,
            beta: INV_GOLDEN_RATIO,
            n_cells,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        for (name, v) in [
            ("t1", self.t1),
            ("t2", self.t2),
            ("w1", self.w1),
            ("w2", self.w2),
            ("gamma", self.gamma),
            ("beta", self.beta),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        if self.n_cells < 2 {
            return Err(Error::InvalidParams(format!(
                "n_cells must be at least 2, got {}",
                self.n_cells
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParams(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        Ok(self)
    }

    /// Number of sites L = 2N.
    pub fn sites(&self) -> usize {
        2 * self.n_cells
    }
}

/// cos(x + iγ) = cos x·cosh γ − i·sin x·sinh γ.
fn complex_cos(x: f64, gamma: f64) -> Complex64 {
    Complex64::new(x.cos() * gamma.cosh(), -x.sin() * gamma.sinh())
}

/// Hopping amplitude on site-chain bond `m` (1-based, 1 ≤ m ≤ 2N−1).
///
/// Odd `m` is the intracell bond Aₙ–Bₙ with n = (m+1)/2 and returns t₁.
/// Even `m` is the intercell bond Bₙ–Aₙ₊₁ with n = m/2:
/// odd n = 2k−1 returns t₂ + W₁·cos(2πβk + iγ) for k ≤ ⌈N/2⌉,
/// even n = 2k returns t₂ + W₂·cos(2πβk + iγ) for k ≤ ⌈(N+1)/2⌉ − 1,
/// and bare t₂ past those ceiling limits. For every N the limits cover all
/// existing intercell bonds, so no modulated bond is ever truncated; the
/// bounds are asserted structurally by tests.
pub fn bond_amplitude(params: &ModelParams, m: usize) -> Result<Complex64> {
    let max = 2 * params.n_cells - 1;
    if m < 1 || m > max {
        return Err(Error::BondIndex { index: m, max });
    }
    if m % 2 == 1 {
        return Ok(Complex64::new(params.t1, 0.0));
    }
    let n = m / 2;
    let (strength, k, limit) = if n % 2 == 1 {
        // n = 2k−1, limit ⌈N/2⌉
        (params.w1, n.div_ceil(2), params.n_cells.div_ceil(2))
    } else {
        // n = 2k, limit ⌈(N+1)/2⌉ − 1 = ⌊N/2⌋
        (params.w2, n / 2, params.n_cells / 2)
    };
    let mut amp = Complex64::new(params.t2, 0.0);
    if k <= limit {
        amp += strength * complex_cos(2.0 * PI * params.beta * k as f64, params.gamma);
    }
    Ok(amp)
}

/// Sublattice label of a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

/// The chain Hamiltonian: tridiagonal with zero diagonal, complex symmetric.
/// Stored as its superdiagonal band; dense views are materialized on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_cells: usize,
    off: Vec<Complex64>,
}

/// Builds the L×L Hamiltonian with H[i,i+1] = H[i+1,i] = bond m = i+1
/// (0-based sites, ordering A₁,B₁,A₂,B₂,…).
pub fn build_hamiltonian(params: &ModelParams) -> Result<Hamiltonian> {
    let p = params.clone().validated()?;
    let l = p.sites();
    let off = (1..l)
        .map(|m| bond_amplitude(&p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Hamiltonian {
        n_cells: p.n_cells,
        off,
    })
}

impl Hamiltonian {
    /// Assembles a chain directly from its superdiagonal band (element i
    /// couples sites i and i+1). The band length must be odd so the chain
    /// ends on a complete cell.
    pub fn from_off_diagonal(off: Vec<Complex64>) -> Result<Self> {
        if off.is_empty() || off.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "off-diagonal band must have odd length (complete cells), got {}",
                off.len()
            )));
        }
        Ok(Hamiltonian {
            n_cells: off.len().div_ceil(2),
            off,
        })
    }

    /// Number of sites L.
    pub fn dim(&self) -> usize {
        2 * self.n_cells
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// The superdiagonal band; element i couples sites i and i+1.
    pub fn off_diagonal(&self) -> &[Complex64] {
        &self.off
    }

    /// Entry H[i,j], 0-based.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match j.abs_diff(i) {
            1 => self.off[i.min(j)],
            _ => Complex64::ZERO,
        }
    }

    /// Dense column-major copy (eigensolver input). Symmetry makes the
    /// row-major and column-major layouts identical.
    pub fn to_col_major(&self) -> Vec<Complex64> {
        let l = self.dim();
        let mut a = vec![Complex64::ZERO; l * l];
        for (i, &z) in self.off.iter().enumerate() {
            a[i + (i + 1) * l] = z;
            a[(i + 1) + i * l] = z;
        }
        a
    }

    /// Dense view as a matrix.
    pub fn dense(&self) -> ColMat {
        ColMat::from_col_major(self.dim(), self.dim(), self.to_col_major())
    }

    /// y = H·v using the band structure; O(L).
    pub fn apply(&self, v: &[Complex64], y: &mut [Complex64]) {
        let l = self.dim();
        assert_eq!(v.len(), l);
        assert_eq!(y.len(), l);
        for i in 0..l {
            let mut acc = Complex64::ZERO;
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < l {
                acc += self.off[i] * v[i + 1];
            }
            y[i] = acc;
        }
    }

    /// Maximum row sum ‖H‖_∞.
    pub fn infinity_norm(&self) -> f64 {
        let l = self.dim();
        (0..l)
            .map(|i| {
                let mut s = 0.0;
                if i > 0 {
                    s += self.off[i - 1].norm();
                }
                if i + 1 < l {
                    s += self.off[i].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// (cell index 1..=N, sublattice) for each site.
    pub fn site_labels(&self) -> Vec<(usize, Sublattice)> {
        (0..self.dim())
            .map(|i| {
                (
                    i / 2 + 1,
                    if i % 2 == 0 { Sublattice::A } else { Sublattice::B },
                )
            })
            .collect()
    }

    /// Nonzero entries as (row, col, re, im) triplets, 0-based, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64, f64)> {
        let mut out = Vec::with_capacity(2 * self.off.len());
        for (i, &z) in self.off.iter().enumerate() {
            out.push((i, i + 1, z.re, z.im));
        }
        for (i, &z) in self.off.iter().enumerate() {
            out.push((i + 1, i, z.re, z.im));
        }
        out.sort_unstable_by_key(|t| (t.0, t.1));
        out
    }
}

/// Alternating-sign diagonal chiral operator C = diag(+1, −1, +1, −1, …)
/// with C² = I and C H C⁻¹ = −H for every chain Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiralOperator {
    signs: Vec<f64>,
}

pub fn chiral_operator(dim: usize) -> Result<ChiralOperator> {
    if !dim.is_multiple_of(2) {
        return Err(Error::OddDimension(dim));
    }
    Ok(ChiralOperator {
        signs: (0..dim)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect(),
    })
}

impl ChiralOperator {
    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }
}

#[cfg(test)]
mod tests {
    // frozen oracle digits intentionally exceed f64 precision
    #![allow(clippy::excessive_precision)]
    use super::*;

    // Frozen high-precision reference values (40-digit fixed-point evaluation,
    // independently reproduced by the arbitrary-precision oracle in the
    // integration tests).
    const COS_2PI_BETA: f64 = -0.7373688780783199015182;
    const SIN_2PI_BETA: f64 = -0.6754902942615236423444;
    const COS_4PI_BETA: f64 = 0.08742572471696039964257;
    const SIN_4PI_BETA: f64 = 0.9961710408648277200981;
    const COSH_02: f64 = 1.020066755619075846296;
    const SINH_02: f64 = 0.2013360025410939876256;

    fn params(t1: f64, t2: f64, w1: f64, w2: f64, gamma: f64, n: usize) -> ModelParams {
        ModelParams::new(t1, t2, w1, w2, gamma, n).unwrap()
    }

    #[test]
    fn beta_default_is_inverse_golden_ratio() {
        assert_eq!(INV_GOLDEN_RATIO, (5.0_f64.sqrt() - 1.0) / 2.0);
        assert_eq!(params(1.0, 1.0, 0.0, 0.0, 0.0, 4).beta, INV_GOLDEN_RATIO);
    }

    #[test]
    fn clean_limit_bond_amplitudes() {
        let p = params(1.0, 0.5, 0.0, 0.0, 0.7, 8);
        assert_eq!(bond_amplitude(&p, 1).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(bond_amplitude(&p, 2).unwrap(), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn modulated_bond_matches_reference_cosine() {
        // w1 = 1, γ = 0, first odd intercell bond (n = 1, k = 1): t2 + cos(2πβ)
        let p = params(1.0, 0.5, 1.0, 0.0, 0.0, 8);
        let amp = bond_amplitude(&p, 2).unwrap();
        assert!((amp.re - (0.5 + COS_2PI_BETA)).abs() < 1e-15);
        assert_eq!(amp.im, 0.0);
    }

    #[test]
    fn complex_bond_matches_cosine_identity() {
        // γ = 0.2, w1 = 1, k = 1: t2 + cos(2πβ)cosh γ − i sin(2πβ)sinh γ
        let p = params(1.0, 0.5, 1.0, 0.0, 0.2, 8);
        let amp = bond_amplitude(&p, 2).unwrap();
        assert!((amp.re - (0.5 + COS_2PI_BETA * COSH_02)).abs() < 1e-15);
        assert!((amp.im - (-SIN_2PI_BETA * SINH_02)).abs() < 1e-15);
    }

    #[test]
    fn bond_index_bounds() {
        let p = params(1.0, 0.5, 0.0, 0.0, 0.0, 4);
        assert!(matches!(
            bond_amplitude(&p, 0),
            Err(Error::BondIndex { index: 0, max: 7 })
        ));
        assert!(bond_amplitude(&p, 7).is_ok());
        assert!(matches!(
            bond_amplitude(&p, 8),
            Err(Error::BondIndex { index: 8, max: 7 })
        ));
    }

    #[test]
    fn clean_n2_matrix() {
        let h = build_hamiltonian(&params(1.0, 0.5, 0.0, 0.0, 0.0, 2)).unwrap();
        let expected = [1.0, 0.5, 1.0];
        assert_eq!(h.dim(), 4);
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(h.entry(i, i + 1), Complex64::new(e, 0.0));
            assert_eq!(h.entry(i + 1, i), Complex64::new(e, 0.0));
        }
        for i in 0..4 {
            assert_eq!(h.entry(i, i), Complex64::ZERO);
        }
    }

    #[test]
    fn n4_entries_match_hand_enumeration() {
        // N=4, t1=1, t2=1.3, w1=1, w2=0.5, γ=0.2. Intercell bonds:
        // (B₁,A₂): n=1 odd, k=1, W₁; (B₂,A₃): n=2 even, k=1, W₂;
        // (B₃,A₄): n=3 odd, k=2, W₁.
        let h = build_hamiltonian(&params(1.0, 1.3, 1.0, 0.5, 0.2, 4)).unwrap();
        let cases = [
            // (site row, w, cos, sin)
            (1usize, 1.0, COS_2PI_BETA, SIN_2PI_BETA),
            (3, 0.5, COS_2PI_BETA, SIN_2PI_BETA),
            (5, 1.0, COS_4PI_BETA, SIN_4PI_BETA),
        ];
        for (i, w, c, s) in cases {
            let z = h.entry(i, i + 1);
            assert!((z.re - (1.3 + w * c * COSH_02)).abs() < 1e-15);
            assert!((z.im - (-w * s * SINH_02)).abs() < 1e-15);
        }
        // intracell bonds are bare t1
        for i in [0usize, 2, 4, 6] {
            assert_eq!(h.entry(i, i + 1), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn structural_invariants_hold() {
        let p = params(0.7, 1.3, 1.1, 0.4, 0.35, 9); // odd N included
        let h = build_hamiltonian(&p).unwrap();
        let l = h.dim();
        let d = h.dense();
        for i in 0..l {
            for j in 0..l {
                // complex symmetric, zero diagonal, bandwidth 1
                assert_eq!(d.at(i, j), d.at(j, i));
                if i == j {
                    assert_eq!(d.at(i, j), Complex64::ZERO);
                }
                if j.abs_diff(i) > 1 {
                    assert_eq!(d.at(i, j), Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn chiral_anticommutation_exact() {
        let h = build_hamiltonian(&params(1.0, 1.3, 1.0, 0.5, 0.2, 6)).unwrap();
        let c = chiral_operator(h.dim()).unwrap();
        let d = h.dense();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let lhs = c.sign(i) * d.at(i, j) * c.sign(j);
                assert_eq!(lhs, -d.at(i, j));
            }
        }
    }

    #[test]
    fn hermitian_limit_is_real() {
        let h = build_hamiltonian(&params(1.0, 1.3, 1.0, 0.5, 0.0, 8)).unwrap();
        for z in h.off_diagonal() {
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn gamma_negation_conjugates_entries() {
        let hp = build_hamiltonian(&params(1.0, 1.3, 1.0, 0.5, 0.4, 8)).unwrap();
        let hm = build_hamiltonian(&params(1.0, 1.3, 1.0, 0.5, -0.4, 8)).unwrap();
        for (a, b) in hp.off_diagonal().iter().zip(hm.off_diagonal()) {
            assert_eq!(a.conj(), *b);
        }
    }

    #[test]
    fn zero_disorder_ignores_gamma_and_beta() {
        let a = build_hamiltonian(&params(1.0, 1.3, 0.0, 0.0, 2.0, 8)).unwrap();
        let mut p = params(1.0, 1.3, 0.0, 0.0, -0.3, 8);
        p.beta = 0.123;
        let b = build_hamiltonian(&p).unwrap();
        assert_eq!(a.off_diagonal(), b.off_diagonal());
    }

    #[test]
    fn ceiling_limits_cover_every_intercell_bond() {
        // For every N, the modulation limits reach at least as far as the
        // largest existing intercell bond of each parity, so a nonzero W
        // always modulates all its bonds (no truncated tail, no overrun).
        for n in 2..=41usize {
            let p = params(1.0, 1.3, 1.0, 1.0, 0.0, n);
            let bare = Complex64::new(1.3, 0.0);
            for bond_n in 1..n {
                let amp = bond_amplitude(&p, 2 * bond_n).unwrap();
                assert_ne!(amp, bare, "unmodulated intercell bond n={bond_n} at N={n}");
            }
            // no out-of-range modulated bond: the largest k of each parity
            // (odd bonds reach k = ⌈(N−1)/2⌉, even bonds k = ⌊(N−1)/2⌋)
            // stays within its ceiling limit
            assert!((n - 1).div_ceil(2) <= n.div_ceil(2));
            assert!((n - 1) / 2 <= n / 2);
        }
    }

    #[test]
    fn validation_rejects_bad_params() {
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 1).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 0.0, 0.0, 0.0, 4).is_err());
        let mut p = params(1.0, 1.0, 0.0, 0.0, 0.0, 4);
        p.beta = 1.0;
        assert!(p.validated().is_err());
    }

    #[test]
    fn chiral_operator_shape() {
        let c = chiral_operator(4).unwrap();
        assert_eq!(c.signs(), &[1.0, -1.0, 1.0, -1.0]);
        let c10 = chiral_operator(10).unwrap();
        // C·C = I and trace 0
        assert!(c10.signs().iter().all(|s| s * s == 1.0));
        assert_eq!(c10.signs().iter().sum::<f64>(), 0.0);
        assert!(matches!(chiral_operator(5), Err(Error::OddDimension(5))));
    }

    #[test]
    fn site_labels_alternate() {
        let h = build_hamiltonian(&params(1.0, 1.0, 0.0, 0.0, 0.0, 3)).unwrap();
        let labels = h.site_labels();
        assert_eq!(labels[0], (1, Sublattice::A));
        assert_eq!(labels[1], (1, Sublattice::B));
        assert_eq!(labels[4], (3, Sublattice::A));
        assert_eq!(labels[5], (3, Sublattice::B));
    }

    #[test]
    fn triplets_enumerate_band() {
        let h = build_hamiltonian(&params(1.0, 0.5, 0.0, 0.0, 0.0, 2)).unwrap();
        let t = h.triplets();
        assert_eq!(t.len(), 6);
        assert_eq!(t[0], (0, 1, 1.0, 0.0));
        assert_eq!(t[1], (1, 0, 1.0, 0.0));
        assert_eq!(t[2], (1, 2, 0.5, 0.0));
    }
}
