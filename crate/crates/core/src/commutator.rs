//! Moment identities for commutators of smoothed delta operators.
//!
//! With the Gaussian regularization `δ_σ`, first moments are exact:
//! `∫ λ δ_σ(λI - T) dλ = T`. The double moment
//! `∫∫ λμ [δ_σ(λI - S), δ_σ(μI - T)] dλ dμ` therefore factorizes into
//! `[S, T]`, and that factorization is what the checks here assert.
//! Lorentzian kernels are rejected: their first moments exist only as
//! principal values.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{smoothed_delta, smoothed_pairing, KernelKind, SmoothingKernel, COVERAGE_WIDTHS};
use crate::operator::HermitianOperator;
use crate::quadrature::{check_ascending, check_coverage, trapezoid_weights};
use crate::{CMatrix, CVector};

/// Default cap on stored matrices in [`delta_product_curve`], in bytes.
pub const DEFAULT_MEMORY_BUDGET: usize = 256 << 20;

/// Two Hermitian operators of equal dimension.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    s: HermitianOperator,
    t: HermitianOperator,
}

impl OperatorPair {
    pub fn new(s: HermitianOperator, t: HermitianOperator) -> Result<Self> {
        if s.dim() != t.dim() {
            return Err(Error::DimensionMismatch { left: s.dim(), right: t.dim() });
        }
        Ok(Self { s, t })
    }

    pub fn s(&self) -> &HermitianOperator {
        &self.s
    }

    pub fn t(&self) -> &HermitianOperator {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn swapped(&self) -> Self {
        Self { s: self.t.clone(), t: self.s.clone() }
    }
}

/// `ST - TS`.
pub fn commutator(s: &HermitianOperator, t: &HermitianOperator) -> Result<CMatrix> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch { left: s.dim(), right: t.dim() });
    }
    Ok(s.matrix() * t.matrix() - t.matrix() * s.matrix())
}

fn require_gaussian(kernel: &SmoothingKernel) -> Result<()> {
    if kernel.kind() != KernelKind::Gaussian {
        return Err(Error::Parameter(
            "moment checks need the Gaussian kernel; Lorentzian first moments diverge".into(),
        ));
    }
    Ok(())
}

fn check_moment_grid(op: &HermitianOperator, kernel: &SmoothingKernel, grid: &[f64]) -> Result<()> {
    check_ascending(grid)?;
    let spec = op.spectrum()?;
    let pad = COVERAGE_WIDTHS * kernel.width();
    check_coverage(grid, spec.min() - pad, spec.max() + pad)
}

/// Samples of `δ_σ(λ_k I - S) δ_σ(μ_l I - T)`, row-major in `(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaProduct {
    Full(Vec<CMatrix>),
    /// `⟨y, δ_σ(λ_k I - S) δ_σ(μ_l I - T) x⟩`.
    Contracted(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaProductCurve {
    pub lambda_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    pub values: DeltaProduct,
}

impl DeltaProductCurve {
    pub fn index(&self, k: usize, l: usize) -> usize {
        k * self.mu_grid.len() + l
    }
}

/// Pointwise products of Gaussian-smoothed deltas on a `λ × μ` grid.
///
/// With `contract = Some((x, y))` only the scalars `⟨y, · x⟩` are kept.
/// Full storage that would exceed `budget` bytes is refused.
pub fn delta_product_curve(
    pair: &OperatorPair,
    lambda_grid: &[f64],
    mu_grid: &[f64],
    kernel: &SmoothingKernel,
    contract: Option<(&CVector, &CVector)>,
    budget: usize,
) -> Result<DeltaProductCurve> {
    require_gaussian(kernel)?;
    check_ascending(lambda_grid)?;
    check_ascending(mu_grid)?;
    let n = pair.dim();
    let cells = lambda_grid.len() * mu_grid.len();
    let ds: Vec<CMatrix> = lambda_grid.iter().map(|&l| smoothed_delta(&pair.s, l, kernel)).collect::<Result<_>>()?;
    let es: Vec<CMatrix> = mu_grid.iter().map(|&m| smoothed_delta(&pair.t, m, kernel)).collect::<Result<_>>()?;
    let values = match contract {
        None => {
            let required = cells.saturating_mul(n * n).saturating_mul(std::mem::size_of::<Complex64>());
            if required > budget {
                return Err(Error::MemoryBudget { required, budget });
            }
            DeltaProduct::Full(
                (0..cells).into_par_iter().map(|c| &ds[c / mu_grid.len()] * &es[c % mu_grid.len()]).collect(),
            )
        }
        Some((x, y)) => {
            if x.len() != n || y.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: x.len().max(y.len()) });
            }
            // ⟨y, D E x⟩ = (D^H y)^H (E x)
            let ex: Vec<CVector> = es.iter().map(|e| e * x).collect();
            let dy: Vec<CVector> = ds.iter().map(|d| d.adjoint() * y).collect();
            DeltaProduct::Contracted(
                (0..cells).into_par_iter().map(|c| dy[c / mu_grid.len()].dotc(&ex[c % mu_grid.len()])).collect(),
            )
        }
    };
    Ok(DeltaProductCurve { lambda_grid: lambda_grid.to_vec(), mu_grid: mu_grid.to_vec(), values })
}

/// Unfactorized double trapezoid of
/// `λμ (δ_σ(λI - S) δ_σ(μI - T) - δ_σ(μI - T) δ_σ(λI - S))`.
pub fn double_moment_commutator(
    pair: &OperatorPair,
    kernel: &SmoothingKernel,
    lambda_grid: &[f64],
    mu_grid: &[f64],
) -> Result<CMatrix> {
    require_gaussian(kernel)?;
    check_moment_grid(&pair.s, kernel, lambda_grid)?;
    check_moment_grid(&pair.t, kernel, mu_grid)?;
    let weighted = |op: &HermitianOperator, grid: &[f64]| -> Result<Vec<CMatrix>> {
        grid.iter()
            .zip(trapezoid_weights(grid))
            .map(|(&l, w)| smoothed_delta(op, l, kernel).map(|d| d * Complex64::new(w * l, 0.0)))
            .collect()
    };
    let ds = weighted(&pair.s, lambda_grid)?;
    let es = weighted(&pair.t, mu_grid)?;
    let n = pair.dim();
    let rows: Vec<CMatrix> = ds
        .par_iter()
        .map(|d| {
            let mut row = CMatrix::zeros(n, n);
            for e in &es {
                row += d * e - e * d;
            }
            row
        })
        .collect();
    let mut acc = CMatrix::zeros(n, n);
    for r in &rows {
        acc += r;
    }
    Ok(acc)
}

/// `∫ λ δ_σ(λI - T) dλ`, which equals `T` up to grid truncation.
pub fn single_moment_check(op: &HermitianOperator, kernel: &SmoothingKernel, grid: &[f64]) -> Result<CMatrix> {
    require_gaussian(kernel)?;
    check_moment_grid(op, kernel, grid)?;
    smoothed_pairing(op, |l| Complex64::new(l, 0.0), kernel, grid)
}

/// `[∫ λ δ_σ(λI - S) dλ, ∫ μ δ_σ(μI - T) dμ]`, the factorized path.
pub fn factorized_moment_commutator(
    pair: &OperatorPair,
    kernel: &SmoothingKernel,
    lambda_grid: &[f64],
    mu_grid: &[f64],
) -> Result<CMatrix> {
    let a = single_moment_check(&pair.s, kernel, lambda_grid)?;
    let b = single_moment_check(&pair.t, kernel, mu_grid)?;
    Ok(&a * &b - &b * &a)
}

/// Pauli matrices `σ_x, σ_y, σ_z`.
pub fn pauli() -> [HermitianOperator; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let build = |rows: [[Complex64; 2]; 2]| {
        HermitianOperator::new(CMatrix::from_fn(2, 2, |r, c| rows[r][c]), 0.0).expect("Pauli matrices are Hermitian")
    };
    [build([[z, o], [o, z]]), build([[z, -i], [i, z]]), build([[o, z], [z, -o]])]
}
