//! Validated Hermitian operators and their exact spectral decomposition.
//!
//! [`SpectralDecomposition`] is the reference every approximate route in the
//! crate is measured against: smoothed deltas, contour integrals, time
//! quadratures and resolvent limits all reduce to weighted sums of the
//! eigenprojectors computed here.

use std::ops::Range;
use std::sync::OnceLock;

use nalgebra::storage::RawStorage;
use nalgebra::{Dim, Matrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

/// Relative clustering threshold for degenerate eigenvalues.
pub const CLUSTER_RTOL: f64 = 1e-8;

/// Dense Hermitian matrix, the finite-dimensional stand-in for a
/// self-adjoint operator.
///
/// Its decomposition is computed lazily once and shared by every caller.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
    hermiticity_tol: f64,
    spectrum: OnceLock<Result<SpectralDecomposition>>,
}

impl HermitianOperator {
    /// Validates `entries` and symmetrizes it to `(A + A^H) / 2`.
    ///
    /// Deviations from Hermiticity up to `tol` (absolute, max-entry) are
    /// repaired; anything larger is rejected.
    pub fn new(entries: CMatrix, tol: f64) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(tol >= 0.0) {
            return Err(Error::Parameter(format!("hermiticity tolerance must be >= 0, got {tol}")));
        }
        let adjoint = entries.adjoint();
        let deviation = max_abs(&(&entries - &adjoint));
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        let matrix = (&entries + &adjoint) * Complex64::new(0.5, 0.0);
        Ok(Self { matrix, hermiticity_tol: tol, spectrum: OnceLock::new() })
    }

    /// Builds from row-major nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: bad.len() });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| rows[i][j]), tol)
    }

    /// Builds a real symmetric operator from row-major rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&complex, 0.0)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(
            CMatrix::from_fn(
                n,
                n,
                |i, j| {
                    if i == j {
                        Complex64::new(values[i], 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                },
            ),
            0.0,
        )
    }

    pub fn scalar(n: usize, a: f64) -> Result<Self> {
        Self::diagonal(&vec![a; n])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.hermiticity_tol
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// The exact spectral decomposition, computed on first use.
    pub fn spectrum(&self) -> Result<&SpectralDecomposition> {
        self.spectrum.get_or_init(|| decompose(self)).as_ref().map_err(Clone::clone)
    }

    /// `-T`, used to evaluate `δ(μI + T)` as the delta of `-T` at `μ`.
    pub fn negated(&self) -> Self {
        Self { matrix: -self.matrix.clone(), hermiticity_tol: self.hermiticity_tol, spectrum: OnceLock::new() }
    }

    /// `T²`, symmetrized.
    pub fn squared(&self) -> Self {
        let sq = &self.matrix * &self.matrix;
        let tol = 1e-12 * max_abs(&sq).max(1.0);
        Self::new(sq, tol).expect("square of a Hermitian matrix is Hermitian")
    }

    /// `T - aI`.
    pub fn shifted(&self, a: f64) -> Self {
        let n = self.dim();
        Self {
            matrix: &self.matrix - CMatrix::identity(n, n) * Complex64::new(a, 0.0),
            hermiticity_tol: self.hermiticity_tol,
            spectrum: OnceLock::new(),
        }
    }
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

/// Ascending eigenvalues with an orthonormal eigenvector basis.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
    cluster_tol: f64,
    clusters: Vec<Range<usize>>,
}

/// One spectral point together with the orthogonal projector onto its
/// eigenspace.
#[derive(Debug, Clone)]
pub struct EigenProjector {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub projector: CMatrix,
}

/// Diagonalizes `op`, sorting eigenvalues ascending and grouping
/// near-degenerate ones into clusters.
pub fn decompose(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = op.dim();
    let max_niter = 1000 * n.max(8);
    let eig = SymmetricEigen::try_new(op.matrix.clone(), f64::EPSILON, max_niter).ok_or(Error::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let norm = eigenvalues.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let cluster_tol = CLUSTER_RTOL * norm.max(1.0);
    let clusters = cluster(&eigenvalues, cluster_tol);
    Ok(SpectralDecomposition { eigenvalues, vectors, cluster_tol, clusters })
}

fn cluster(sorted: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn spectral_range(&self) -> f64 {
        self.max() - self.min()
    }

    /// `max |λ_i|`.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// Distinct spectral points (cluster means), ascending.
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        self.clusters.iter().map(|r| self.cluster_value(r)).collect()
    }

    fn cluster_value(&self, r: &Range<usize>) -> f64 {
        self.eigenvalues[r.clone()].iter().sum::<f64>() / r.len() as f64
    }

    /// Euclidean distance from `z` to the nearest eigenvalue.
    pub fn distance_to_spectrum(&self, z: Complex64) -> f64 {
        self.eigenvalues.iter().map(|&l| (z - l).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Projectors onto each distinct eigenspace; they sum to the identity.
    pub fn eigenprojectors(&self) -> Vec<EigenProjector> {
        self.clusters
            .iter()
            .map(|r| {
                let cols = self.vectors.columns(r.start, r.len());
                EigenProjector {
                    eigenvalue: self.cluster_value(r),
                    multiplicity: r.len(),
                    projector: cols * cols.adjoint(),
                }
            })
            .collect()
    }

    /// `Σ f(λ_i) v_i v_i^H` over individual eigenpairs.
    pub fn apply_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Like [`apply_fn`](Self::apply_fn) but evaluates `f` once per
    /// cluster at the cluster mean, so degenerate points get identical
    /// weights.
    pub fn apply_cluster_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for r in &self.clusters {
            let w = f(self.cluster_value(r));
            for j in r.clone() {
                for i in 0..n {
                    scaled[(i, j)] *= w;
                }
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `Σ f(λ) P_λ v` per cluster, in `O(n²)` without forming matrices.
    pub fn apply_cluster_fn_to_vector<F: Fn(f64) -> Complex64>(&self, f: F, v: &CVector) -> CVector {
        let mut coeffs = self.vectors.adjoint() * v;
        for r in &self.clusters {
            let w = f(self.cluster_value(r));
            for j in r.clone() {
                coeffs[j] *= w;
            }
        }
        &self.vectors * coeffs
    }

    /// Per-cluster scalar weights `⟨y, P_i x⟩`.
    pub fn matrix_elements(&self, x: &CVector, y: &CVector) -> Vec<(f64, Complex64)> {
        let cx = self.vectors.adjoint() * x;
        let cy = self.vectors.adjoint() * y;
        self.clusters
            .iter()
            .map(|r| {
                let s: Complex64 = r.clone().map(|j| cy[j].conj() * cx[j]).sum();
                (self.cluster_value(r), s)
            })
            .collect()
    }

    /// `V diag(λ) V^H`.
    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(|l| Complex64::new(l, 0.0))
    }
}

/// Largest entry modulus of a complex matrix or vector.
pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |U^H U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::*;

    #[test]
    fn viola_eigenvalues() {
        let m = viola();
        let d = m.spectrum().unwrap();
        let ev = d.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] + 1.0).abs() < 1e-12);
        assert!((ev[2] - 2.0).abs() < 1e-12);
        assert_eq!(d.distinct_eigenvalues().len(), 2);
        assert!(unitarity_defect(d.vectors()) < 1e-10);
        assert!(max_abs(&(d.reconstruct() - m.matrix())) < 1e-9 * m.max_norm());
    }

    #[test]
    fn viola_projectors() {
        let d = viola().spectrum().unwrap().clone();
        let ps = d.eigenprojectors();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].multiplicity, 2);
        assert!(max_abs(&(&ps[0].projector - viola_p_minus1())) < 1e-10);
        assert!(max_abs(&(&ps[1].projector - ones3() / c(3.0))) < 1e-10);
    }

    #[test]
    fn anti_hermitian_rejected() {
        let i = Complex64::i();
        let z = c(0.0);
        let err = HermitianOperator::from_rows(&[vec![z, i], vec![i, z]], 0.0).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn non_square_rejected() {
        let err = HermitianOperator::new(CMatrix::zeros(2, 3), 0.0).unwrap_err();
        assert_eq!(err, Error::NotSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn small_asymmetry_is_repaired() {
        let m = HermitianOperator::from_real_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-14, 0.0]]);
        assert!(matches!(m, Err(Error::NotHermitian { .. })));
        let rows = vec![vec![c(1.0), c(2.0)], vec![c(2.0 + 1e-14), c(0.0)]];
        let m = HermitianOperator::from_rows(&rows, 1e-12).unwrap();
        assert_eq!(m.matrix()[(0, 1)], m.matrix()[(1, 0)].conj());
    }

    #[test]
    fn scalar_and_trivial_cases() {
        let a = HermitianOperator::from_real_rows(&[vec![3.5]]).unwrap();
        assert_eq!(a.spectrum().unwrap().eigenvalues(), &[3.5]);

        let id = HermitianOperator::scalar(2, 1.0).unwrap();
        let d = id.spectrum().unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 1.0]);
        let ps = d.eigenprojectors();
        assert_eq!(ps.len(), 1);
        assert!(max_abs(&(&ps[0].projector - CMatrix::identity(2, 2))) < 1e-12);

        let diag = HermitianOperator::diagonal(&[3.0, 1.0]).unwrap();
        let d = diag.spectrum().unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 3.0]);
        // eigenvector for 1 is e_2
        assert!((d.vectors()[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cluster_merges() {
        let m = HermitianOperator::diagonal(&[1.0, 1.0 + 1e-12, 2.0]).unwrap();
        let ps = m.spectrum().unwrap().eigenprojectors();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].multiplicity, 2);
    }
}
