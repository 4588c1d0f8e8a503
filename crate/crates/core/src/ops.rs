//! Dense complex-matrix primitives: validated Hermitian operators with
//! cached eigendecompositions, the spin-1/2 site algebra, Kronecker
//! embedding into chains, commutators, and Heisenberg evolution.
//!
//! Matrices are `ndarray::Array2<Complex64>` throughout. Eigenproblems go
//! to LAPACK (`zheev` family) through `ndarray-linalg`; eigenvalues come
//! back in ascending order. Nothing here is sparse — the dense cap
//! [`MAX_SITES`] keeps chain Hilbert spaces at or below 2^13 states, where
//! full diagonalization is still routine.

use std::sync::OnceLock;

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Largest chain length dense 2^M x 2^M work is allowed to touch.
pub const MAX_SITES: usize = 13;

/// Relative Frobenius tolerance for the Hermiticity check in
/// [`HermitianOperator::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Frobenius norm `(sum |a_ij|^2)^(1/2)`.
pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Largest entrywise modulus of `a - b`. Panics on shape mismatch.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.dim(), b.dim(), "max_abs_diff needs equal shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Complex identity matrix.
pub fn identity(dim: usize) -> Array2<C64> {
    Array2::eye(dim)
}

/// Matrix trace.
pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvector
/// columns of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Array1<f64>,
    pub vectors: Array2<C64>,
}

/// A square matrix that passed the Hermiticity check at construction,
/// carrying a lazily computed, cached eigendecomposition.
///
/// The cache is a [`OnceLock`], so concurrent `eig()` calls race benignly:
/// at most one decomposition is kept, and every caller sees the same one.
#[derive(Debug)]
pub struct HermitianOperator {
    mat: Array2<C64>,
    eig: OnceLock<EigenDecomposition>,
}

impl HermitianOperator {
    /// Wrap a matrix, rejecting it unless `||A - A^dag||_F <= 1e-12 ||A||_F`.
    pub fn new(mat: Array2<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let norm = frobenius_norm(&mat);
        if norm > 0.0 {
            let dev = frobenius_norm(&(&mat - &adjoint(&mat)));
            if dev > HERMITICITY_TOL * norm {
                return Err(Error::NotHermitian(dev / norm));
            }
        }
        // Pin row-major layout so the LAPACK call in `eig` always sees the
        // same memory order (and the conjugation fixup there stays valid).
        let mat = if mat.is_standard_layout() {
            mat
        } else {
            mat.as_standard_layout().into_owned()
        };
        Ok(HermitianOperator {
            mat,
            eig: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    /// The eigendecomposition, computed on first use and cached. Columns
    /// of `vectors` are orthonormal eigenvectors: `A = V diag(E) V^dag`.
    pub fn eig(&self) -> &EigenDecomposition {
        self.eig.get_or_init(|| {
            let (values, vectors) = self
                .mat
                .eigh(UPLO::Lower)
                .expect("LAPACK failed on a validated Hermitian matrix");
            // LAPACK reads our row-major buffer as the transpose, so for a
            // Hermitian matrix it diagonalizes conj(A) and hands back its
            // eigenvectors — the conjugates of ours. Conjugate them back;
            // the reconstruction unit test pins this convention.
            let vectors = vectors.mapv(|z| z.conj());
            EigenDecomposition { values, vectors }
        })
    }

    /// Ascending eigenvalues (triggers the decomposition on first use).
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eig().values
    }
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let eig = OnceLock::new();
        if let Some(e) = self.eig.get() {
            let _ = eig.set(e.clone());
        }
        HermitianOperator {
            mat: self.mat.clone(),
            eig,
        }
    }
}

/// A named one-site (2x2) operator.
#[derive(Debug, Clone)]
pub struct SiteObservable {
    op: Array2<C64>,
    label: String,
}

impl SiteObservable {
    pub fn new(op: Array2<C64>, label: impl Into<String>) -> Result<Self> {
        if op.dim() != (2, 2) {
            return Err(Error::NotSquare {
                rows: op.nrows(),
                cols: op.ncols(),
            });
        }
        Ok(SiteObservable {
            op,
            label: label.into(),
        })
    }

    pub fn op(&self) -> &Array2<C64> {
        &self.op
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_hermitian(&self) -> bool {
        max_abs_diff(&self.op, &adjoint(&self.op)) <= 1e-14
    }

    /// A rescaled copy, e.g. `sz/2` from `sz`.
    pub fn scaled(&self, factor: f64, label: impl Into<String>) -> SiteObservable {
        SiteObservable {
            op: self.op.mapv(|z| z * factor),
            label: label.into(),
        }
    }
}

/// The spin-1/2 operator basis: identity, the three Pauli matrices, and
/// the ladder operators `sp = (sx + i sy)/2`, `sm = sp^dag`.
#[derive(Debug, Clone)]
pub struct Paulis {
    pub id: SiteObservable,
    pub x: SiteObservable,
    pub y: SiteObservable,
    pub z: SiteObservable,
    pub plus: SiteObservable,
    pub minus: SiteObservable,
}

/// Build the standard basis in the `sz = diag(1, -1)` convention.
pub fn pauli() -> Paulis {
    let c = C64::new;
    let mk = |entries: [[C64; 2]; 2], label: &str| {
        let mut m = Array2::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                m[[i, j]] = entries[i][j];
            }
        }
        SiteObservable::new(m, label).expect("2x2 by construction")
    };
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    Paulis {
        id: mk([[l, o], [o, l]], "id"),
        x: mk([[o, l], [l, o]], "x"),
        y: mk([[o, c(0.0, -1.0)], [c(0.0, 1.0), o]], "y"),
        z: mk([[l, o], [o, c(-1.0, 0.0)]], "z"),
        plus: mk([[o, l], [o, o]], "plus"),
        minus: mk([[o, o], [l, o]], "minus"),
    }
}

/// Embed a one-site operator at `site` of an M-site chain:
/// `id^(site) (x) op (x) id^(M-1-site)`, with site 0 the leftmost factor.
pub fn embed(op: &Array2<C64>, site: usize, sites: usize) -> Result<Array2<C64>> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::SizeCap {
            sites,
            max: MAX_SITES,
        });
    }
    if site >= sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    if op.dim() != (2, 2) {
        return Err(Error::NotSquare {
            rows: op.nrows(),
            cols: op.ncols(),
        });
    }
    let left = identity(1 << site);
    let right = identity(1 << (sites - 1 - site));
    Ok(kron(&kron(&left, op), &right))
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    if a.dim() != b.dim() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(a.dot(b) - b.dot(a))
}

/// Heisenberg evolution `exp(i t H) a exp(-i t H)` through the cached
/// eigenbasis of `h`.
pub fn heisenberg_evolve(h: &HermitianOperator, a: &Array2<C64>, t: f64) -> Result<Array2<C64>> {
    if a.dim() != (h.dim(), h.dim()) {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: a.nrows(),
        });
    }
    let eig = h.eig();
    let u = &eig.vectors;
    let mut a_eig = adjoint(u).dot(a).dot(u);
    for ((p, q), z) in a_eig.indexed_iter_mut() {
        let phase = t * (eig.values[p] - eig.values[q]);
        *z *= C64::new(0.0, phase).exp();
    }
    Ok(u.dot(&a_eig).dot(&adjoint(u)))
}
