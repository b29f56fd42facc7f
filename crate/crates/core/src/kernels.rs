//! Smoothed realizations of the operator delta `δ(λI - T)`.
//!
//! Two regularizations are provided. The Lorentzian of width `ε` is the
//! resolvent jump across the real axis,
//! `(1/2πi)[R(λ - iε) - R(λ + iε)] = (ε/π)((λI - T)² + ε²I)^{-1}`, and has
//! heavy tails. The Gaussian of width `σ` comes from damping the time
//! representation `(1/2π)∫ e^{it(λI - T)} dt` by `exp(-σ²t²/2)`; all its
//! moments are finite, so moment identities are tested with it.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, SpectralDecomposition};
use crate::quadrature::{check_ascending, check_coverage, linspace, nodes_for_spacing, trapezoid_weights};
use crate::resolvent::{invert, resolvent};
use crate::{CMatrix, CVector};

/// Grids must reach this many kernel widths past the spectrum.
pub const COVERAGE_WIDTHS: f64 = 8.0;
/// Default grid resolution.
pub const POINTS_PER_WIDTH: f64 = 20.0;
/// Default width as a fraction of the spectral range.
pub const DEFAULT_WIDTH_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Lorentzian,
    Gaussian,
}

/// Regularization of `δ(λ - μ)`; `width` is `ε` or `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingKernel {
    kind: KernelKind,
    width: f64,
}

impl SmoothingKernel {
    pub fn new(kind: KernelKind, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Parameter(format!("kernel width must be positive, got {width}")));
        }
        Ok(Self { kind, width })
    }

    pub fn lorentzian(eps: f64) -> Result<Self> {
        Self::new(KernelKind::Lorentzian, eps)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian, sigma)
    }

    /// Width `0.05 · spectral range` (or `0.05` for a single spectral point).
    pub fn default_for(kind: KernelKind, spec: &SpectralDecomposition) -> Self {
        let range = spec.spectral_range();
        let w = if range > spec.cluster_tol() { DEFAULT_WIDTH_FRACTION * range } else { DEFAULT_WIDTH_FRACTION };
        Self { kind, width: w }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn with_width(self, width: f64) -> Result<Self> {
        Self::new(self.kind, width)
    }

    pub fn value(&self, x: f64) -> f64 {
        let w = self.width;
        match self.kind {
            KernelKind::Lorentzian => w / (PI * (x * x + w * w)),
            KernelKind::Gaussian => gaussian_density(x, w),
        }
    }

    /// `d/dx` of [`value`](Self::value).
    pub fn derivative(&self, x: f64) -> f64 {
        let w = self.width;
        match self.kind {
            KernelKind::Lorentzian => {
                let d = x * x + w * w;
                -2.0 * w * x / (PI * d * d)
            }
            KernelKind::Gaussian => -x / (w * w) * gaussian_density(x, w),
        }
    }

    /// Upper bound of the kernel at distance `d ≥ 0` from its center.
    pub fn tail_bound(&self, d: f64) -> f64 {
        self.value(d.abs())
    }

    /// Uniform grid over the spectrum padded by `pad_widths` kernel widths.
    pub fn grid_for(&self, spec: &SpectralDecomposition, pad_widths: f64) -> Vec<f64> {
        let a = spec.min() - pad_widths * self.width;
        let b = spec.max() + pad_widths * self.width;
        linspace(a, b, nodes_for_spacing(a, b, self.width / POINTS_PER_WIDTH))
    }

    fn check_covers(&self, grid: &[f64], spec: &SpectralDecomposition) -> Result<()> {
        let pad = COVERAGE_WIDTHS * self.width;
        check_coverage(grid, spec.min() - pad, spec.max() + pad)
    }
}

/// Unit-mass normal density with standard deviation `sigma`.
pub fn gaussian_density(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}

/// `Σ_i K(λ - λ_i) P_i` from the eigen-decomposition.
pub fn smoothed_delta(op: &HermitianOperator, lambda: f64, kernel: &SmoothingKernel) -> Result<CMatrix> {
    let spec = op.spectrum()?;
    Ok(spec.apply_fn(|l| Complex64::new(kernel.value(lambda - l), 0.0)))
}

/// `(1/2πi)[R(λ - iε, T) - R(λ + iε, T)]` from two LU solves.
pub fn lorentzian_delta(op: &HermitianOperator, lambda: f64, eps: f64) -> Result<CMatrix> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
    }
    let below = resolvent(op, Complex64::new(lambda, -eps)).map_err(singular)?;
    let above = resolvent(op, Complex64::new(lambda, eps)).map_err(singular)?;
    Ok((below.matrix - above.matrix) / Complex64::new(0.0, 2.0 * PI))
}

fn singular(e: Error) -> Error {
    match e {
        Error::SpectrumHit { .. } => Error::SingularSolve,
        other => other,
    }
}

/// `(ε/π)((λI - T)² + ε²I)^{-1}`, the real-arithmetic form of
/// [`lorentzian_delta`].
pub fn lorentzian_delta_quadratic(op: &HermitianOperator, lambda: f64, eps: f64) -> Result<CMatrix> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
    }
    let n = op.dim();
    let id = CMatrix::identity(n, n);
    let shifted = &id * Complex64::new(lambda, 0.0) - op.matrix();
    let a = &shifted * &shifted + id * Complex64::new(eps * eps, 0.0);
    Ok(invert(a)? * Complex64::new(eps / PI, 0.0))
}

/// `(1/2π) ∫ exp(-σ²t²/2) e^{it(λI - T)} dt` over `[-t_cut, t_cut]` with
/// `n_t` trapezoid nodes.
///
/// Equals `Σ_i g_σ(λ - λ_i) P_i` up to quadrature and truncation error.
/// The unitary group is evaluated through the eigenbasis, so each time node
/// costs one scalar exponential per eigenvalue.
pub fn time_quadrature_delta(
    op: &HermitianOperator,
    lambda: f64,
    sigma: f64,
    t_cut: f64,
    n_t: usize,
) -> Result<CMatrix> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    if n_t < 16 {
        return Err(Error::Parameter(format!("n_t must be at least 16, got {n_t}")));
    }
    if !(t_cut >= 6.0 / sigma) {
        return Err(Error::Parameter(format!("t_cut = {t_cut} is below 6/sigma = {}", 6.0 / sigma)));
    }
    let spec = op.spectrum()?;
    let ts = linspace(-t_cut, t_cut, n_t);
    let ws = trapezoid_weights(&ts);
    let damp: Vec<f64> =
        ts.iter().zip(&ws).map(|(&t, &w)| w * (-0.5 * sigma * sigma * t * t).exp() / (2.0 * PI)).collect();
    Ok(spec.apply_fn(|l| ts.iter().zip(&damp).map(|(&t, &w)| Complex64::from_polar(w, t * (lambda - l))).sum()))
}

/// Sampled matrix element `λ ↦ ⟨y, δ_K(λI - T) x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub kernel: SmoothingKernel,
    pub x_label: String,
    pub y_label: String,
    /// `(min, max)` of the operator spectrum, when known.
    pub spectrum_bounds: Option<(f64, f64)>,
}

/// Evaluates the density curve exactly through the eigen-decomposition:
/// `Σ_i K(λ_k - λ_i) ⟨y, P_i x⟩`.
pub fn density_curve(
    op: &HermitianOperator,
    x: &CVector,
    y: &CVector,
    grid: &[f64],
    kernel: &SmoothingKernel,
) -> Result<DensityCurve> {
    check_ascending(grid)?;
    let n = op.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: x.len().max(y.len()) });
    }
    if x.iter().chain(y.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let spec = op.spectrum()?;
    let elements = spec.matrix_elements(x, y);
    let values = grid.par_iter().map(|&l| elements.iter().map(|&(mu, w)| w * kernel.value(l - mu)).sum()).collect();
    Ok(DensityCurve {
        grid: grid.to_vec(),
        values,
        kernel: *kernel,
        x_label: "x".into(),
        y_label: "y".into(),
        spectrum_bounds: Some((spec.min(), spec.max())),
    })
}

impl DensityCurve {
    pub fn with_labels(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    /// Trapezoid integral of the curve.
    pub fn integral(&self) -> Complex64 {
        trapezoid_weights(&self.grid).iter().zip(&self.values).map(|(w, v)| v * *w).sum()
    }

    /// Writes `lambda,re,im` rows with 17 significant digits, preceded by
    /// an optional `# ...` comment line.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "lambda,re,im")?;
        for (l, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", l, v.re, v.im)?;
        }
        Ok(())
    }

    /// Parses the format written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: BufRead>(input: R, kernel: SmoothingKernel) -> Result<Self> {
        let (grid, values) = read_xy_csv(input, "lambda")?;
        check_ascending(&grid)?;
        Ok(Self { grid, values, kernel, x_label: "x".into(), y_label: "y".into(), spectrum_bounds: None })
    }
}

/// Reads `<abscissa>,re,im` CSV, skipping `#` comment lines.
pub(crate) fn read_xy_csv<R: BufRead>(input: R, first_column: &str) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut seen_header = false;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            let expected = format!("{first_column},re,im");
            if line != expected {
                return Err(Error::Format(format!("expected header `{expected}`, got `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Format(format!("expected 3 columns, got `{line}`")));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Format(format!("{s}: {e}")));
        grid.push(num(cols[0])?);
        values.push(Complex64::new(num(cols[1])?, num(cols[2])?));
    }
    if !seen_header {
        return Err(Error::Format("missing header".into()));
    }
    Ok((grid, values))
}

/// Trapezoid quadrature of `f(λ_k) · curve(λ_k)`, approximating
/// `⟨y, f(T) x⟩` with `f` convolved by the kernel.
pub fn weak_pairing<F: Fn(f64) -> Complex64>(curve: &DensityCurve, f: F) -> Result<Complex64> {
    if let Some((lo, hi)) = curve.spectrum_bounds {
        let pad = COVERAGE_WIDTHS * curve.kernel.width();
        check_coverage(&curve.grid, lo - pad, hi + pad)?;
    }
    Ok(trapezoid_weights(&curve.grid)
        .iter()
        .zip(&curve.grid)
        .zip(&curve.values)
        .map(|((w, &l), v)| f(l) * v * *w)
        .sum())
}

/// `∫ f(λ) δ_K(λI - T) dλ` by trapezoid on `grid`, as a matrix.
pub fn smoothed_pairing<F: Fn(f64) -> Complex64>(
    op: &HermitianOperator,
    f: F,
    kernel: &SmoothingKernel,
    grid: &[f64],
) -> Result<CMatrix> {
    check_ascending(grid)?;
    let spec = op.spectrum()?;
    kernel.check_covers(grid, spec)?;
    let ws = trapezoid_weights(grid);
    let fw: Vec<Complex64> = grid.iter().zip(&ws).map(|(&l, &w)| f(l) * w).collect();
    Ok(spec.apply_fn(|mu| grid.iter().zip(&fw).map(|(&l, &c)| c * kernel.value(l - mu)).sum()))
}

/// `∫ f(λ) (d/dλ) δ_K(λI - T) dλ` with the analytic kernel derivative;
/// tends to `-f'(T)` as the width shrinks.
pub fn delta_derivative_pairing<F: Fn(f64) -> Complex64>(
    op: &HermitianOperator,
    f: F,
    kernel: &SmoothingKernel,
    grid: &[f64],
) -> Result<CMatrix> {
    check_ascending(grid)?;
    let spec = op.spectrum()?;
    kernel.check_covers(grid, spec)?;
    let ws = trapezoid_weights(grid);
    let fw: Vec<Complex64> = grid.iter().zip(&ws).map(|(&l, &w)| f(l) * w).collect();
    Ok(spec.apply_fn(|mu| grid.iter().zip(&fw).map(|(&l, &c)| c * kernel.derivative(l - mu)).sum()))
}

/// `∫ f(λ) (1/2√λ) [δ_K(√λ I - T) + δ_K(√λ I + T)] dλ` over a grid in
/// `(0, ∞)`, which tends to `f(T²)`.
///
/// `δ_K(μI + T)` is the delta of `-T` at `μ`. The two branches are added:
/// substituting `μ = -√λ` in the second one turns it into the negative
/// half-line part of `∫ f(μ²) δ(μI - T) dμ`.
pub fn square_split_apply<F: Fn(f64) -> Complex64>(
    op: &HermitianOperator,
    f: F,
    kernel: &SmoothingKernel,
    grid: &[f64],
) -> Result<CMatrix> {
    check_ascending(grid)?;
    if grid[0] <= 0.0 {
        return Err(Error::Domain(format!("grid must lie in (0, inf), starts at {}", grid[0])));
    }
    let spec = op.spectrum()?;
    let pad = COVERAGE_WIDTHS * kernel.width();
    let abs_min = spec.eigenvalues().iter().fold(f64::INFINITY, |a, l| a.min(l.abs()));
    let abs_max = spec.spectral_radius();
    let need_lo = if abs_min > pad { (abs_min - pad).powi(2) } else { grid[0] };
    check_coverage(grid, need_lo, (abs_max + pad).powi(2))?;
    let ws = trapezoid_weights(grid);
    let fw: Vec<(f64, Complex64)> = grid
        .iter()
        .zip(&ws)
        .map(|(&l, &w)| {
            let r = l.sqrt();
            (r, f(l) * (w / (2.0 * r)))
        })
        .collect();
    Ok(spec.apply_fn(|mu| fw.iter().map(|&(r, c)| c * (kernel.value(r - mu) + kernel.value(r + mu))).sum()))
}
