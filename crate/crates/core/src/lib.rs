//! Smoothed operator-valued delta functions for Hermitian matrices.
//!
//! For a Hermitian `T` with spectral family `E_λ`, the delta operator
//! `δ(λI - T) = dE_λ/dλ` is regularized by a Lorentzian (through the
//! resolvent jump across the real axis) or a Gaussian (through the unitary
//! group). Pairing it with `f` gives `f(T)`, which is cross-checked against
//! the eigen-decomposition, a Dunford contour integral, a time-domain
//! quadrature and the resolvent limit.
//!
//! ```
//! use spectral_delta::functional_calculus::{apply, CalculusMethod, ScalarFunction};
//! use spectral_delta::HermitianOperator;
//!
//! let t = HermitianOperator::diagonal(&[-1.0, 2.0]).unwrap();
//! let f = ScalarFunction::gaussian(0.0, 1.0);
//! let eig = apply(&t, &f, &CalculusMethod::Eigen).unwrap();
//! let dun = apply(&t, &f, &CalculusMethod::dunford_for(&t, 256).unwrap()).unwrap();
//! assert!((eig - dun).iter().all(|z| z.norm() < 1e-8));
//! ```

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commutator;
pub mod error;
pub mod functional_calculus;
pub mod golden;
pub mod io;
pub mod kernels;
pub mod measures;
pub mod models;
pub mod operator;
pub mod quadrature;
pub mod random;
pub mod resolvent;

#[cfg(test)]
mod test_util;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub use error::{Error, Result};
pub use operator::{EigenProjector, HermitianOperator, SpectralDecomposition};
