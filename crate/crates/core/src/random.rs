//! Seeded random operators for property suites and demos.

use nalgebra::linalg::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::HermitianOperator;
use crate::CMatrix;

/// Deterministic generator used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `(A + A^H)/2` with entries of `A` uniform in the unit square.
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> HermitianOperator {
    let a = random_complex_matrix(n, rng);
    HermitianOperator::new((&a + a.adjoint()) * Complex64::new(0.5, 0.0), 0.0).expect("symmetrized matrix is Hermitian")
}

/// Unitary `Q` factor of a random complex matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    QR::new(random_complex_matrix(n, rng)).q()
}

/// Point in the box `[lo, hi] × [-h, h]` at distance at least `gap` from
/// the real points `avoid`.
pub fn random_off_spectrum<R: Rng>(lo: f64, hi: f64, h: f64, gap: f64, avoid: &[f64], rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(lo..hi), rng.random_range(-h..h));
        if avoid.iter().all(|&l| (z - l).norm() >= gap) {
            return z;
        }
    }
}
