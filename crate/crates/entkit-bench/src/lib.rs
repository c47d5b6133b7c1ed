//! Deterministic fixtures shared by the benchmark suite: Gaussian densities
//! of chosen rank and seeded non-eigenbasis range bases.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use entkit_core::linalg::{self, CMatrix, CVector};

/// Density operator of the requested rank: a normalized Gaussian Gram matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let trace = rho.trace().re;
    rho.unscale(trace)
}

/// Orthonormal basis of the range of `rho`, mixed by a seeded unitary so the
/// benches never run on the trivial eigenbasis case.
pub fn rotated_range_basis(rho: &CMatrix, seed: u64) -> Vec<CVector> {
    let basis = linalg::range_basis(rho).expect("densities are positive semidefinite");
    let rank = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mixer = CMatrix::from_fn(rank, rank, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = mixer.qr().q();
    linalg::columns(&(linalg::from_columns(&basis) * q))
}
