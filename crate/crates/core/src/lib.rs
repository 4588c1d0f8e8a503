//! Numerical workbench for spontaneous symmetry breaking on spin-1/2 chains.
//!
//! The crate covers three layers of the same physics:
//!
//! * **Mean field** ([`bcs`]): the strong-coupling pairing model with
//!   Hamiltonian `H_N = eps * sum_i sz_i - (1/M) * sum_ij sp_i sm_j` on
//!   `M = 2N+1` sites. Its gap equation, effective one-site Hamiltonian,
//!   and the broken-symmetry order parameter all have closed forms, which
//!   makes it the exactly solvable reference point for everything else.
//! * **Fluctuations** ([`fluctuations`]): momentum-weighted fluctuation
//!   operators `F_{n,k}(A) = |L|^{-1/2} sum_x (A_x - w(A)) cos(k x)` on
//!   finite chains, their cumulants and characteristic functions, and the
//!   spectral measures of the Liouvillian `[H, .]` that control their
//!   dynamics (Duhamel two-point functions, susceptibilities, the
//!   Bogoliubov inequality).
//! * **Normal modes** ([`modes`]): the harmonic-oscillator algebra the
//!   fluctuations converge to — canonical pairs `(Q, P)` with
//!   `[Q, P] = i c`, their thermal statistics, zero-temperature
//!   renormalization, and the scaling exponents of the anomalous regimes.
//!
//! [`ops`] holds the dense complex-matrix primitives (validated Hermitian
//! operators with cached eigendecompositions, Pauli algebra, Kronecker
//! embedding), and [`models`] builds chain Hamiltonians and the states
//! (product, Gibbs, ground) expectations are taken in.
//!
//! Everything is dense: chains are capped at [`ops::MAX_SITES`] sites so
//! full diagonalization stays the workhorse throughout.

// Link the system BLAS/LAPACK once for the whole crate graph.
extern crate blas_src;

use std::fmt;
use std::str::FromStr;

pub mod bcs;
pub mod fluctuations;
pub mod models;
pub mod modes;
pub mod ops;

#[cfg(test)]
pub(crate) mod testutil;

pub use num_complex::Complex64 as C64;

pub use bcs::{GapSolution, GoldstoneStatistics, SuperoperatorSpectrum, SymmetryDecomposition};
pub use fluctuations::{DuhamelValue, FluctuationObservable, SpectralMeasure};
pub use models::{InteractionSpec, PairTerm, QuantumState};
pub use modes::{GaussianBump, LimitSystem, ModeFamily, NormalMode};
pub use ops::{EigenDecomposition, HermitianOperator, Paulis, SiteObservable};

/// Inverse temperature, with the zero-temperature limit as a first-class
/// value so `beta = inf` never has to be smuggled through a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    /// Finite inverse temperature, strictly positive.
    Finite(f64),
    /// The zero-temperature (ground-state) limit.
    Infinite,
}

impl Beta {
    /// A finite inverse temperature; must be positive and finite.
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Beta::Finite(value))
        } else {
            Err(Error::BetaOutOfRange(value))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    /// The numeric value for finite beta, `None` at zero temperature.
    pub fn finite_value(self) -> Option<f64> {
        match self {
            Beta::Finite(b) => Some(b),
            Beta::Infinite => None,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Beta::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse beta from {s:?}")))?;
        Beta::finite(v)
    }
}

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("site {site} out of range for a chain of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("{sites} sites exceed the dense cap of {max} (2^{max} basis states)")]
    SizeCap { sites: usize, max: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("the on-site level splitting must lie strictly inside (0, 1/2), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("beta must be positive and finite, got {0}")]
    BetaOutOfRange(f64),
    #[error("scaling regime requires delta <= nu, got delta = {delta}, nu = {nu}")]
    InvalidRegime { delta: f64, nu: u32 },
    #[error("operation requires {required}, got {got}")]
    UnsupportedState {
        required: &'static str,
        got: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
