//! Shared helpers for unit tests: deterministic random matrices.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::ops::adjoint;

/// Deterministic dense Hermitian test matrix.
pub(crate) fn random_hermitian(dim: usize, seed: u64) -> Array2<C64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut m: Array2<C64> = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            m[[i, j]] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let ad = adjoint(&m);
    (&m + &ad).mapv(|z| z * 0.5)
}
