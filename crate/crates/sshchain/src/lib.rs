//! Numerical toolkit for a quasiperiodic non-Hermitian SSH chain.
//!
//! The chain alternates intracell (t₁) and intercell (t₂) hoppings on an
//! open lattice of N two-site cells; intercell bonds carry an incommensurate
//! complex modulation W·cos(2πβk + iγ) that makes the matrix complex
//! symmetric instead of Hermitian. The crate builds the Hamiltonian
//! ([`model`]), solves the biorthogonal eigenproblem ([`spectral`]), measures
//! participation ratios and classifies localization regimes
//! ([`localization`]), evaluates the real-space winding number under open
//! boundaries ([`topology`]), and drives parameter sweeps with transition
//! detection and finite-size scans ([`sweep`]).
//!
//! Dense eigensolves go through LAPACK (`zgeev`); everything downstream of
//! the decomposition is deterministic for fixed inputs.

pub mod error;
pub mod mat;
pub mod model;
pub mod spectral;
pub mod localization;
pub mod topology;
pub mod sweep;

mod backend;

pub use error::{Error, Result};
pub use mat::ColMat;
pub use model::{build_hamiltonian, chiral_operator, Hamiltonian, ModelParams, INV_GOLDEN_RATIO};
pub use spectral::{eigendecompose, eigendecompose_right_only, EigenSystem};
pub use localization::{classify_regime, LocalizationReport, Regime, Thresholds};
pub use topology::{winding_number, WindingConfig, WindingRecord, WINDING_CALIBRATION};
pub use sweep::{run_sweep, RunSettings, SweepOutput, SweepSpec};
