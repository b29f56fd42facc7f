//! Fixtures shared by unit tests.

use num_complex::Complex64;

use crate::operator::HermitianOperator;
use crate::CMatrix;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn viola() -> HermitianOperator {
    HermitianOperator::from_real_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap()
}

pub fn ones3() -> CMatrix {
    CMatrix::from_element(3, 3, c(1.0))
}

/// (1/3)[[2,-1,-1],[-1,2,-1],[-1,-1,2]]
pub fn viola_p_minus1() -> CMatrix {
    CMatrix::identity(3, 3) - ones3() / c(3.0)
}

pub fn random_hermitian(n: usize, seed: u64) -> HermitianOperator {
    crate::random::random_hermitian(n, &mut crate::random::rng(seed))
}
