//! `f(T)` by four independent routes, Taylor partial sums of the delta
//! expansion, unitary conjugation and iterated pairings.
//!
//! The routes are:
//!
//! * `Eigen`: `Σ f(λ_i) P_i`, exact up to the eigen-solver.
//! * `Dunford`: `(1/2πi) ∮ f(z) R(z, T) dz` on a contour.
//! * `TimeQuadrature`: `∫ G(t) e^{-itT} dt` where `f(λ) = ∫ G(t) e^{-itλ} dt`,
//!   for the builtins whose `G` is known in closed form.
//! * `ResolventLimit`: `∫ f(λ) δ_K(λI - T) dλ` for a smoothing kernel `K`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{smoothed_delta, smoothed_pairing, SmoothingKernel, COVERAGE_WIDTHS};
use crate::operator::{max_abs, unitarity_defect, HermitianOperator, SpectralDecomposition};
use crate::quadrature::{check_ascending, linspace, trapezoid_weights};
use crate::resolvent::{dunford_apply, Contour, SINGULAR_RTOL};
use crate::CMatrix;

/// Largest admissible `‖U^H U - I‖_max` in [`conjugate`].
pub const UNITARY_TOL: f64 = 1e-10;

/// Scalar test functions with analytic derivatives, Taylor data and, for
/// some kinds, a closed-form inverse Fourier transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFunction {
    Constant {
        value: f64,
    },
    /// `Σ_k coeffs[k] λ^k`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `e^{sλ}`.
    Exponential {
        #[serde(with = "lenient_complex", default = "complex_one")]
        scale: Complex64,
    },
    /// `exp(-(λ - c)² / 2w²)`, peak value 1.
    Gaussian {
        center: f64,
        width: f64,
    },
    /// `w² / ((λ - c)² + w²)`, peak value 1.
    LorentzianWeight {
        center: f64,
        width: f64,
    },
    /// `p(λ - c) exp(-(λ - c)² / 2w²)` with `p = Σ coeffs[k] u^k`.
    PolyGaussian {
        coeffs: Vec<f64>,
        center: f64,
        width: f64,
    },
    /// `Y(t - λ)`: one for `λ ≤ t`, zero above, so `f(T) = E_t`.
    Heaviside {
        threshold: f64,
    },
    /// `1 / (s - λ)`, so `f(T) = R(s, T)`.
    Reciprocal {
        #[serde(with = "lenient_complex")]
        shift: Complex64,
    },
    Sin {
        #[serde(default = "unit")]
        frequency: f64,
    },
    Cos {
        #[serde(default = "unit")]
        frequency: f64,
    },
    Product {
        factors: Vec<ScalarFunction>,
    },
}

fn complex_one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn unit() -> f64 {
    1.0
}

/// Power series at 0 with its radius of convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub coeffs: Vec<Complex64>,
    pub radius: f64,
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_derivative(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().enumerate().skip(1).rev().fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

fn cauchy(a: &[Complex64], b: &[Complex64], order: usize) -> Vec<Complex64> {
    (0..=order).map(|k| (0..=k).filter(|&j| j < a.len() && k - j < b.len()).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// Taylor coefficients of `exp(-(λ - c)² / 2w²)` at 0.
fn gaussian_taylor(c: f64, w: f64, order: usize) -> Vec<Complex64> {
    let a = c / (w * w);
    let mut lin = Vec::with_capacity(order + 1);
    let mut term = (-0.5 * (c / w).powi(2)).exp();
    for k in 0..=order {
        lin.push(Complex64::new(term, 0.0));
        term *= a / (k + 1) as f64;
    }
    let mut quad = vec![Complex64::new(0.0, 0.0); order + 1];
    let q = -0.5 / (w * w);
    let mut t = 1.0;
    let mut j = 0;
    while 2 * j <= order {
        quad[2 * j] = Complex64::new(t, 0.0);
        j += 1;
        t *= q / j as f64;
    }
    cauchy(&lin, &quad, order)
}

/// Coefficients of `p(λ - c)` in powers of `λ`.
fn shifted_polynomial(coeffs: &[f64], c: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len().max(1)];
    for (k, &a) in coeffs.iter().enumerate() {
        let mut binom = 1.0;
        for (j, o) in out.iter_mut().enumerate().take(k + 1) {
            *o += a * binom * (-c).powi((k - j) as i32);
            binom *= (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// Probabilists' Hermite polynomial `He_k(u)`.
fn hermite_he(k: usize, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, u);
    if k == 0 {
        return prev;
    }
    for m in 1..k {
        let next = u * cur - m as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl ScalarFunction {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::Polynomial { coeffs }
    }

    pub fn exponential(scale: Complex64) -> Self {
        Self::Exponential { scale }
    }

    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::Gaussian { center, width }
    }

    pub fn heaviside(threshold: f64) -> Self {
        Self::Heaviside { threshold }
    }

    pub fn reciprocal(shift: Complex64) -> Self {
        Self::Reciprocal { shift }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{what} must be finite")))
            }
        };
        let positive = |w: f64| {
            if w > 0.0 && w.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("width must be positive, got {w}")))
            }
        };
        match self {
            Self::Constant { value } => finite(*value, "constant"),
            Self::Polynomial { coeffs } => coeffs.iter().try_for_each(|&c| finite(c, "coefficient")),
            Self::Exponential { scale } => finite(scale.re + scale.im, "scale"),
            Self::Gaussian { center, width } | Self::LorentzianWeight { center, width } => {
                finite(*center, "center")?;
                positive(*width)
            }
            Self::PolyGaussian { coeffs, center, width } => {
                coeffs.iter().try_for_each(|&c| finite(c, "coefficient"))?;
                finite(*center, "center")?;
                positive(*width)
            }
            Self::Heaviside { threshold } => finite(*threshold, "threshold"),
            Self::Reciprocal { shift } => finite(shift.re + shift.im, "shift"),
            Self::Sin { frequency } | Self::Cos { frequency } => finite(*frequency, "frequency"),
            Self::Product { factors } => factors.iter().try_for_each(Self::validate),
        }
    }

    /// Value at a complex point. The Heaviside step uses `Re z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Self::Constant { value } => Complex64::new(*value, 0.0),
            Self::Polynomial { coeffs } => horner(coeffs, z),
            Self::Exponential { scale } => (scale * z).exp(),
            Self::Gaussian { center, width } => {
                let u = (z - center) / width;
                (-0.5 * u * u).exp()
            }
            Self::LorentzianWeight { center, width } => {
                let u = z - center;
                width * width / (u * u + width * width)
            }
            Self::PolyGaussian { coeffs, center, width } => {
                let u = z - center;
                let v = u / width;
                horner(coeffs, u) * (-0.5 * v * v).exp()
            }
            Self::Heaviside { threshold } => {
                if z.re <= *threshold {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Self::Reciprocal { shift } => one / (shift - z),
            Self::Sin { frequency } => (z * frequency).sin(),
            Self::Cos { frequency } => (z * frequency).cos(),
            Self::Product { factors } => factors.iter().map(|f| f.eval(z)).product(),
        }
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    /// Analytic derivative; the Heaviside step is treated as piecewise
    /// constant.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Self::Constant { .. } | Self::Heaviside { .. } => zero,
            Self::Polynomial { coeffs } => horner_derivative(coeffs, z),
            Self::Exponential { scale } => scale * (scale * z).exp(),
            Self::Gaussian { center, width } => {
                let u = z - center;
                let v = u / width;
                -u / (width * width) * (-0.5 * v * v).exp()
            }
            Self::LorentzianWeight { center, width } => {
                let u = z - center;
                let d = u * u + width * width;
                -2.0 * width * width * u / (d * d)
            }
            Self::PolyGaussian { coeffs, center, width } => {
                let u = z - center;
                let v = u / width;
                (horner_derivative(coeffs, u) - horner(coeffs, u) * u / (width * width)) * (-0.5 * v * v).exp()
            }
            Self::Reciprocal { shift } => {
                let d = shift - z;
                Complex64::new(1.0, 0.0) / (d * d)
            }
            Self::Sin { frequency } => (z * frequency).cos() * frequency,
            Self::Cos { frequency } => -(z * frequency).sin() * frequency,
            Self::Product { factors } => (0..factors.len())
                .map(|i| {
                    factors
                        .iter()
                        .enumerate()
                        .map(|(j, f)| if i == j { f.derivative(z) } else { f.eval(z) })
                        .product::<Complex64>()
                })
                .sum(),
        }
    }

    pub fn derivative_real(&self, x: f64) -> Complex64 {
        self.derivative(Complex64::new(x, 0.0))
    }

    pub fn is_analytic(&self) -> bool {
        match self {
            Self::Heaviside { .. } => false,
            Self::Product { factors } => factors.iter().all(Self::is_analytic),
            _ => true,
        }
    }

    /// Whether `f` is real on the real axis.
    pub fn is_real(&self) -> bool {
        match self {
            Self::Exponential { scale } => scale.im == 0.0,
            Self::Reciprocal { shift } => shift.im == 0.0,
            Self::Product { factors } => factors.iter().all(Self::is_real),
            _ => true,
        }
    }

    /// Poles in the finite plane.
    pub fn poles(&self) -> Vec<Complex64> {
        match self {
            Self::Reciprocal { shift } => vec![*shift],
            Self::LorentzianWeight { center, width } => {
                vec![Complex64::new(*center, *width), Complex64::new(*center, -*width)]
            }
            Self::Product { factors } => factors.iter().flat_map(Self::poles).collect(),
            _ => Vec::new(),
        }
    }

    /// `λ ↦ conj(f(λ))` for real `λ`.
    pub fn conj(&self) -> Self {
        match self {
            Self::Exponential { scale } => Self::Exponential { scale: scale.conj() },
            Self::Reciprocal { shift } => Self::Reciprocal { shift: shift.conj() },
            Self::Product { factors } => Self::Product { factors: factors.iter().map(Self::conj).collect() },
            other => other.clone(),
        }
    }

    /// Taylor coefficients `f^(k)(0) / k!` for `k ≤ order`, or `None` when
    /// `f` is not analytic at 0.
    pub fn taylor(&self, order: usize) -> Option<TaylorSeries> {
        let zero = Complex64::new(0.0, 0.0);
        let real = |v: Vec<f64>| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        let factorial_series = |g: &dyn Fn(usize) -> Complex64| {
            let mut out = Vec::with_capacity(order + 1);
            let mut inv_fact = 1.0;
            for k in 0..=order {
                out.push(g(k) * inv_fact);
                inv_fact /= (k + 1) as f64;
            }
            out
        };
        let (coeffs, radius) = match self {
            Self::Constant { value } => (real(vec![*value]), f64::INFINITY),
            Self::Polynomial { coeffs } => (real(coeffs.clone()), f64::INFINITY),
            Self::Exponential { scale } => (factorial_series(&|k| scale.powu(k as u32)), f64::INFINITY),
            Self::Gaussian { center, width } => (gaussian_taylor(*center, *width, order), f64::INFINITY),
            Self::PolyGaussian { coeffs, center, width } => {
                let p = shifted_polynomial(coeffs, *center);
                (cauchy(&p, &gaussian_taylor(*center, *width, order), order), f64::INFINITY)
            }
            Self::LorentzianWeight { center, width } => {
                let a = Complex64::new(*center, *width);
                let pre = Complex64::new(0.0, -0.5 * width);
                let c = (0..=order)
                    .map(|k| {
                        let p = (k + 1) as u32;
                        pre * (a.conj().powu(p).inv() - a.powu(p).inv())
                    })
                    .collect();
                (c, a.norm())
            }
            Self::Heaviside { .. } => return None,
            Self::Reciprocal { shift } => {
                if shift.norm() == 0.0 {
                    return None;
                }
                let c = (0..=order).map(|k| shift.powu(k as u32 + 1).inv()).collect();
                (c, shift.norm())
            }
            Self::Sin { frequency } => (
                factorial_series(&|k| {
                    let s = [0.0, 1.0, 0.0, -1.0][k % 4];
                    Complex64::new(s * frequency.powi(k as i32), 0.0)
                }),
                f64::INFINITY,
            ),
            Self::Cos { frequency } => (
                factorial_series(&|k| {
                    let s = [1.0, 0.0, -1.0, 0.0][k % 4];
                    Complex64::new(s * frequency.powi(k as i32), 0.0)
                }),
                f64::INFINITY,
            ),
            Self::Product { factors } => {
                let mut acc = vec![Complex64::new(1.0, 0.0)];
                let mut radius = f64::INFINITY;
                for f in factors {
                    let s = f.taylor(order)?;
                    acc = cauchy(&acc, &s.coeffs, order);
                    radius = radius.min(s.radius);
                }
                (acc, radius)
            }
        };
        let mut coeffs = coeffs;
        coeffs.resize(order + 1, zero);
        Some(TaylorSeries { coeffs, radius })
    }

    /// `G(t)` with `f(λ) = ∫ G(t) e^{-itλ} dt`, for the kinds that have one
    /// in closed form.
    pub fn inverse_fourier(&self, t: f64) -> Result<Complex64> {
        match self {
            Self::Gaussian { center, width } => {
                let g = width / (2.0 * PI).sqrt() * (-0.5 * (width * t).powi(2)).exp();
                Ok(Complex64::from_polar(g, t * center))
            }
            Self::LorentzianWeight { center, width } => {
                Ok(Complex64::from_polar(0.5 * width * (-width * t.abs()).exp(), t * center))
            }
            Self::PolyGaussian { coeffs, center, width } => {
                // (λ - c)^k f ↔ (iw)^k He_k(wt) G
                let base = width / (2.0 * PI).sqrt() * (-0.5 * (width * t).powi(2)).exp();
                let iw = Complex64::new(0.0, *width);
                let poly: Complex64 =
                    coeffs.iter().enumerate().map(|(k, &a)| iw.powu(k as u32) * (a * hermite_he(k, width * t))).sum();
                Ok(poly * Complex64::from_polar(base, t * center))
            }
            _ => Err(Error::UnsupportedTransform(format!(
                "no closed-form inverse Fourier transform for {}",
                self.name()
            ))),
        }
    }

    /// `(t_cut, band, center)`: `G` is negligible past `t_cut` and `f`
    /// past `band` from `center`, both at roughly double precision
    /// (the Lorentzian weight only reaches about `1e-8` in `band`).
    fn time_scales(&self) -> Result<(f64, f64, f64)> {
        match self {
            Self::Gaussian { center, width } => Ok((9.5 / width, 9.0 * width, *center)),
            Self::PolyGaussian { coeffs, center, width } => {
                let extra = 2.0 * coeffs.len() as f64;
                Ok(((10.0 + extra) / width, (10.0 + extra) * width, *center))
            }
            Self::LorentzianWeight { center, width } => Ok((40.0 / width, 1e4 * width, *center)),
            _ => Err(Error::UnsupportedTransform(format!(
                "no closed-form inverse Fourier transform for {}",
                self.name()
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Polynomial { .. } => "polynomial",
            Self::Exponential { .. } => "exponential",
            Self::Gaussian { .. } => "gaussian",
            Self::LorentzianWeight { .. } => "lorentzian_weight",
            Self::PolyGaussian { .. } => "poly_gaussian",
            Self::Heaviside { .. } => "heaviside",
            Self::Reciprocal { .. } => "reciprocal",
            Self::Sin { .. } => "sin",
            Self::Cos { .. } => "cos",
            Self::Product { .. } => "product",
        }
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_string(self).map_err(|_| fmt::Error)?;
        f.write_str(&s)
    }
}

/// Parses either a JSON object or the short form `name[:a,b,...]`:
/// `one`, `const:v`, `x`, `square`, `poly:c0,c1,..`, `exp[:s]`,
/// `gaussian[:c,w]`, `lorentzian-weight[:c,w]`, `heaviside:t`,
/// `reciprocal:re[,im]`, `sin[:ω]`, `cos[:ω]`.
impl FromStr for ScalarFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let f: Self = serde_json::from_str(s)?;
            f.validate()?;
            return Ok(f);
        }
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let nums: Vec<f64> = match args {
            Some(a) => a
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("`{x}`: {e}"))))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let arity = |lo: usize, hi: usize| {
            if nums.len() < lo || nums.len() > hi {
                Err(Error::Parameter(format!("`{name}` takes {lo} to {hi} arguments, got {}", nums.len())))
            } else {
                Ok(())
            }
        };
        let get = |i: usize, d: f64| nums.get(i).copied().unwrap_or(d);
        let f = match name {
            "one" => {
                arity(0, 0)?;
                Self::constant(1.0)
            }
            "const" => {
                arity(1, 1)?;
                Self::constant(nums[0])
            }
            "x" | "identity" => {
                arity(0, 0)?;
                Self::polynomial(vec![0.0, 1.0])
            }
            "square" => {
                arity(0, 0)?;
                Self::polynomial(vec![0.0, 0.0, 1.0])
            }
            "poly" => {
                arity(1, usize::MAX)?;
                Self::polynomial(nums.clone())
            }
            "exp" => {
                arity(0, 2)?;
                Self::exponential(Complex64::new(get(0, 1.0), get(1, 0.0)))
            }
            "gaussian" => {
                arity(0, 2)?;
                Self::gaussian(get(0, 0.0), get(1, 1.0))
            }
            "lorentzian-weight" | "lorentzian_weight" => {
                arity(0, 2)?;
                Self::LorentzianWeight { center: get(0, 0.0), width: get(1, 1.0) }
            }
            "heaviside" => {
                arity(1, 1)?;
                Self::heaviside(nums[0])
            }
            "reciprocal" => {
                arity(1, 2)?;
                Self::reciprocal(Complex64::new(nums[0], get(1, 0.0)))
            }
            "sin" => {
                arity(0, 1)?;
                Self::Sin { frequency: get(0, 1.0) }
            }
            "cos" => {
                arity(0, 1)?;
                Self::Cos { frequency: get(0, 1.0) }
            }
            other => return Err(Error::Parameter(format!("unknown function `{other}`"))),
        };
        f.validate()?;
        Ok(f)
    }
}

/// How [`apply`] evaluates `f(T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CalculusMethod {
    Eigen,
    Dunford {
        contour: Contour,
    },
    /// `∫ G(t) exp(-σ²t²/2) e^{-itT} dt` on `[-t_cut, t_cut]`; `damping = 0`
    /// integrates the closed-form `G` undamped.
    TimeQuadrature {
        damping: f64,
        t_cut: f64,
        n_t: usize,
    },
    ResolventLimit {
        kernel: SmoothingKernel,
        grid: Vec<f64>,
    },
}

impl CalculusMethod {
    /// Circle around the spectrum with clearance `max(1, range/2)`.
    pub fn dunford_for(op: &HermitianOperator, n_nodes: usize) -> Result<Self> {
        let spec = op.spectrum()?;
        let pad = (0.5 * spec.spectral_range()).max(1.0);
        Ok(Self::Dunford { contour: Contour::enclosing(spec.min(), spec.max(), pad, n_nodes)? })
    }

    /// Undamped rule for `f`: `t_cut` from the decay of `G`, node spacing
    /// small enough that the aliased copies `f(λ ± 2π/h)` fall outside the
    /// band of `f`.
    pub fn time_quadrature_for(op: &HermitianOperator, f: &ScalarFunction) -> Result<Self> {
        let spec = op.spectrum()?;
        let (t_cut, band, center) = f.time_scales()?;
        let reach = (spec.min() - center).abs().max((spec.max() - center).abs());
        let h = 2.0 * PI / (reach + band);
        let half = (t_cut / h).ceil() as usize;
        Ok(Self::TimeQuadrature { damping: 0.0, t_cut, n_t: (2 * half + 1).max(17) })
    }

    /// Grid padded by `COVERAGE_WIDTHS + 1` kernel widths at the kernel's
    /// default resolution.
    pub fn resolvent_limit_for(op: &HermitianOperator, kernel: SmoothingKernel) -> Result<Self> {
        let spec = op.spectrum()?;
        Ok(Self::ResolventLimit { kernel, grid: kernel.grid_for(spec, COVERAGE_WIDTHS + 1.0) })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Eigen => "eigen",
            Self::Dunford { .. } => "dunford",
            Self::TimeQuadrature { .. } => "time_quadrature",
            Self::ResolventLimit { .. } => "resolvent_limit",
        }
    }
}

fn heaviside_guard(f: &ScalarFunction, spec: &SpectralDecomposition) -> Result<()> {
    let mut thresholds = Vec::new();
    collect_thresholds(f, &mut thresholds);
    for t in thresholds {
        let d = spec.distance_to_spectrum(Complex64::new(t, 0.0));
        if d <= spec.cluster_tol() {
            return Err(Error::Domain(format!("step threshold {t} lies on the spectrum (distance {d:.3e})")));
        }
    }
    Ok(())
}

fn collect_thresholds(f: &ScalarFunction, out: &mut Vec<f64>) {
    match f {
        ScalarFunction::Heaviside { threshold } => out.push(*threshold),
        ScalarFunction::Product { factors } => factors.iter().for_each(|g| collect_thresholds(g, out)),
        _ => {}
    }
}

/// `f(T)` by the chosen route.
pub fn apply(op: &HermitianOperator, f: &ScalarFunction, method: &CalculusMethod) -> Result<CMatrix> {
    f.validate()?;
    let spec = op.spectrum()?;
    match method {
        CalculusMethod::Eigen => {
            heaviside_guard(f, spec)?;
            for p in f.poles() {
                let d = spec.distance_to_spectrum(p);
                if d <= SINGULAR_RTOL * spec.spectral_radius().max(1.0) {
                    return Err(Error::SpectrumHit { z: p, distance: d });
                }
            }
            Ok(spec.apply_cluster_fn(|l| f.eval_real(l)))
        }
        CalculusMethod::Dunford { contour } => {
            if !f.is_analytic() {
                return Err(Error::UnsupportedTransform(format!(
                    "{} is not analytic; the contour route needs an analytic f",
                    f.name()
                )));
            }
            contour.validate()?;
            for p in f.poles() {
                if contour.winds_around(p) {
                    return Err(Error::Domain(format!("pole {p} of f lies inside the contour")));
                }
            }
            dunford_apply(op, |z| f.eval(z), contour)
        }
        CalculusMethod::TimeQuadrature { damping, t_cut, n_t } => {
            if !(*damping >= 0.0) || !(*t_cut > 0.0) || *n_t < 16 {
                return Err(Error::Parameter(format!(
                    "time quadrature needs damping >= 0, t_cut > 0, n_t >= 16; got {damping}, {t_cut}, {n_t}"
                )));
            }
            let ts = linspace(-t_cut, *t_cut, *n_t);
            let ws = trapezoid_weights(&ts);
            let g: Vec<(f64, Complex64)> = ts
                .iter()
                .zip(&ws)
                .map(|(&t, &w)| {
                    let damp = (-0.5 * damping * damping * t * t).exp();
                    f.inverse_fourier(t).map(|gt| (t, gt * (w * damp)))
                })
                .collect::<Result<_>>()?;
            Ok(spec.apply_cluster_fn(|l| g.iter().map(|&(t, c)| c * Complex64::from_polar(1.0, -t * l)).sum()))
        }
        CalculusMethod::ResolventLimit { kernel, grid } => {
            heaviside_guard(f, spec)?;
            smoothed_pairing(op, |l| f.eval_real(l), kernel, grid)
        }
    }
}

/// Raised when the Taylor series of `f` at 0 cannot converge on the
/// spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWarning {
    pub spectral_radius: f64,
    pub radius: f64,
}

impl fmt::Display for DivergenceWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DivergenceWarning: spectral radius {} is not below the radius of convergence {}",
            self.spectral_radius, self.radius
        )
    }
}

/// Partial sum `Σ_{k ≤ N} f^(k)(0)/k! T^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSum {
    pub matrix: CMatrix,
    pub order: usize,
    pub warning: Option<DivergenceWarning>,
}

/// Pairs `f` with the formal series `δ(λI - T) = Σ (-1)^k δ^(k)(λ) T^k / k!`,
/// which yields the Taylor partial sum. The sum is always returned; a
/// warning is attached when `ρ(T) ≥` the radius of convergence.
pub fn taylor_delta_apply(op: &HermitianOperator, f: &ScalarFunction, order: usize) -> Result<TaylorSum> {
    f.validate()?;
    let series = f
        .taylor(order)
        .ok_or_else(|| Error::UnsupportedTransform(format!("{} has no Taylor series at 0", f.name())))?;
    let rho = op.spectrum()?.spectral_radius();
    let n = op.dim();
    let t = op.matrix();
    let mut power = CMatrix::identity(n, n);
    let mut acc = CMatrix::zeros(n, n);
    for (k, c) in series.coeffs.iter().enumerate() {
        if k > 0 {
            power = &power * t;
        }
        acc += &power * *c;
    }
    let warning = (rho >= series.radius).then_some(DivergenceWarning { spectral_radius: rho, radius: series.radius });
    Ok(TaylorSum { matrix: acc, order, warning })
}

/// `U^H T U` for unitary `U`.
pub fn conjugate(op: &HermitianOperator, u: &CMatrix) -> Result<HermitianOperator> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare { rows: u.nrows(), cols: u.ncols() });
    }
    if u.nrows() != op.dim() {
        return Err(Error::DimensionMismatch { left: op.dim(), right: u.nrows() });
    }
    let deviation = unitarity_defect(u);
    if !(deviation <= UNITARY_TOL) {
        return Err(Error::NotUnitary { deviation });
    }
    let m = u.adjoint() * op.matrix() * u;
    HermitianOperator::new(m, 1e-10 * op.max_norm().max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationOrder {
    LambdaFirst,
    MuFirst,
}

/// `∫∫ g(λ, μ) δ_K(λI - T) δ_K(μI - T) dλ dμ` by iterated trapezoid
/// quadrature in the given order, with matrix-valued inner integrals.
pub fn iterated_pairing<G: Fn(f64, f64) -> Complex64>(
    op: &HermitianOperator,
    g: G,
    kernel: &SmoothingKernel,
    lambda_grid: &[f64],
    mu_grid: &[f64],
    order: IntegrationOrder,
) -> Result<CMatrix> {
    check_ascending(lambda_grid)?;
    check_ascending(mu_grid)?;
    let deltas = |grid: &[f64]| -> Result<Vec<CMatrix>> {
        let ws = trapezoid_weights(grid);
        grid.iter().zip(ws).map(|(&l, w)| smoothed_delta(op, l, kernel).map(|d| d * Complex64::new(w, 0.0))).collect()
    };
    let dl = deltas(lambda_grid)?;
    let dm = deltas(mu_grid)?;
    let n = op.dim();
    let mut acc = CMatrix::zeros(n, n);
    match order {
        IntegrationOrder::LambdaFirst => {
            for (&mu, em) in mu_grid.iter().zip(&dm) {
                let mut inner = CMatrix::zeros(n, n);
                for (&l, d) in lambda_grid.iter().zip(&dl) {
                    inner += d * g(l, mu);
                }
                acc += inner * em;
            }
        }
        IntegrationOrder::MuFirst => {
            for (&l, d) in lambda_grid.iter().zip(&dl) {
                let mut inner = CMatrix::zeros(n, n);
                for (&mu, em) in mu_grid.iter().zip(&dm) {
                    inner += em * g(l, mu);
                }
                acc += d * inner;
            }
        }
    }
    Ok(acc)
}

/// Max-norm distance between two routes, for reports.
pub fn route_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

pub(crate) mod lenient_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Real(re) => Complex64::new(re, 0.0),
            Repr::Pair([re, im]) => Complex64::new(re, im),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn viola_square_via_eigen() {
        let m = apply(&viola(), &"square".parse().unwrap(), &CalculusMethod::Eigen).unwrap();
        let expect = CMatrix::from_fn(3, 3, |i, j| c(if i == j { 2.0 } else { 1.0 }));
        assert!(close(&m, &expect, 1e-12));
    }

    #[test]
    fn constant_one_gives_identity_on_every_route() {
        let t = viola();
        let f = ScalarFunction::constant(1.0);
        let id = CMatrix::identity(3, 3);
        let eig = apply(&t, &f, &CalculusMethod::Eigen).unwrap();
        let dun = apply(&t, &f, &CalculusMethod::dunford_for(&t, 256).unwrap()).unwrap();
        let k = SmoothingKernel::gaussian(0.05).unwrap();
        let res = apply(&t, &f, &CalculusMethod::resolvent_limit_for(&t, k).unwrap()).unwrap();
        assert!(close(&eig, &id, 1e-12));
        assert!(close(&dun, &id, 1e-10));
        assert!(close(&res, &id, 1e-10));
        // constant has no closed-form transform
        let tq = CalculusMethod::TimeQuadrature { damping: 0.0, t_cut: 10.0, n_t: 64 };
        assert!(matches!(apply(&t, &f, &tq), Err(Error::UnsupportedTransform(_))));
    }

    #[test]
    fn scalar_operator_gives_scalar_value() {
        let t = HermitianOperator::scalar(2, 0.3).unwrap();
        let f = ScalarFunction::gaussian(0.1, 0.7);
        let want = f.eval_real(0.3);
        for m in [
            CalculusMethod::Eigen,
            CalculusMethod::dunford_for(&t, 128).unwrap(),
            CalculusMethod::time_quadrature_for(&t, &f).unwrap(),
        ] {
            let r = apply(&t, &f, &m).unwrap();
            assert!(close(&r, &(CMatrix::identity(2, 2) * want), 1e-9), "{}", m.name());
        }
    }

    #[test]
    fn inverse_fourier_reproduces_functions() {
        for f in [
            ScalarFunction::gaussian(0.4, 0.8),
            ScalarFunction::PolyGaussian { coeffs: vec![1.0, -0.5, 0.25], center: -0.3, width: 1.2 },
        ] {
            let ts = linspace(-30.0, 30.0, 6001);
            let ws = trapezoid_weights(&ts);
            for x in [-1.0, 0.0, 0.7, 2.5] {
                let v: Complex64 = ts
                    .iter()
                    .zip(&ws)
                    .map(|(&t, &w)| f.inverse_fourier(t).unwrap() * Complex64::from_polar(w, -t * x))
                    .sum();
                assert!((v - f.eval_real(x)).norm() < 1e-10, "{} at {x}", f.name());
            }
        }
    }

    #[test]
    fn lorentzian_weight_transform() {
        let f = ScalarFunction::LorentzianWeight { center: 0.5, width: 1.0 };
        let ts = linspace(-60.0, 60.0, 240_001);
        let ws = trapezoid_weights(&ts);
        let x = 1.3;
        let v: Complex64 =
            ts.iter().zip(&ws).map(|(&t, &w)| f.inverse_fourier(t).unwrap() * Complex64::from_polar(w, -t * x)).sum();
        assert!((v - f.eval_real(x)).norm() < 1e-6);
    }

    #[test]
    fn taylor_coefficients_match_values() {
        let fs = [
            ScalarFunction::exponential(Complex64::new(0.5, 0.2)),
            ScalarFunction::gaussian(0.3, 0.9),
            ScalarFunction::LorentzianWeight { center: 1.0, width: 2.0 },
            ScalarFunction::reciprocal(Complex64::new(3.0, 1.0)),
            ScalarFunction::Sin { frequency: 1.5 },
            ScalarFunction::Cos { frequency: 0.5 },
            ScalarFunction::PolyGaussian { coeffs: vec![0.0, 1.0, 2.0], center: 0.2, width: 1.0 },
            ScalarFunction::Product {
                factors: vec![ScalarFunction::gaussian(0.0, 1.0), ScalarFunction::polynomial(vec![1.0, 1.0])],
            },
        ];
        let x = Complex64::new(0.4, 0.0);
        for f in &fs {
            let s = f.taylor(60).unwrap();
            let v: Complex64 = s.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * x + c);
            assert!((v - f.eval(x)).norm() < 1e-12, "{}", f.name());
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let fs = [
            ScalarFunction::gaussian(0.3, 0.9),
            ScalarFunction::LorentzianWeight { center: 1.0, width: 0.5 },
            ScalarFunction::PolyGaussian { coeffs: vec![1.0, 1.0, 2.0], center: 0.2, width: 1.0 },
            ScalarFunction::reciprocal(Complex64::new(3.0, 1.0)),
            ScalarFunction::polynomial(vec![1.0, -2.0, 0.5, 0.25]),
            ScalarFunction::Product {
                factors: vec![ScalarFunction::Sin { frequency: 2.0 }, ScalarFunction::exponential(c(0.3))],
            },
        ];
        let h = 1e-5;
        for f in &fs {
            for x in [-0.7, 0.1, 1.9] {
                let fd = (f.eval_real(x + h) - f.eval_real(x - h)) / (2.0 * h);
                assert!((fd - f.derivative_real(x)).norm() < 1e-7, "{} at {x}", f.name());
            }
        }
    }

    #[test]
    fn heaviside_is_spectral_family_and_guarded() {
        let t = viola();
        let e0 = apply(&t, &ScalarFunction::heaviside(0.0), &CalculusMethod::Eigen).unwrap();
        assert!(close(&e0, &viola_p_minus1(), 1e-12));
        let on = apply(&t, &ScalarFunction::heaviside(-1.0), &CalculusMethod::Eigen);
        assert!(matches!(on, Err(Error::Domain(_))));
        let dun = apply(&t, &ScalarFunction::heaviside(0.0), &CalculusMethod::dunford_for(&t, 64).unwrap());
        assert!(matches!(dun, Err(Error::UnsupportedTransform(_))));
    }

    #[test]
    fn reciprocal_is_resolvent() {
        let t = viola();
        let z = Complex64::new(0.5, 0.25);
        let r = apply(&t, &ScalarFunction::reciprocal(z), &CalculusMethod::Eigen).unwrap();
        let direct = crate::resolvent::resolvent(&t, z).unwrap().matrix;
        assert!(close(&r, &direct, 1e-12));
        let hit = apply(&t, &ScalarFunction::reciprocal(c(2.0)), &CalculusMethod::Eigen);
        assert!(matches!(hit, Err(Error::SpectrumHit { .. })));
        let inside = apply(&t, &ScalarFunction::reciprocal(z), &CalculusMethod::dunford_for(&t, 64).unwrap());
        assert!(matches!(inside, Err(Error::Domain(_))));
    }

    #[test]
    fn taylor_exp_on_viola() {
        let t = viola();
        let f = ScalarFunction::exponential(c(1.0));
        let exact = apply(&t, &f, &CalculusMethod::Eigen).unwrap();
        let s = taylor_delta_apply(&t, &f, 30).unwrap();
        assert!(s.warning.is_none());
        assert!(close(&s.matrix, &exact, 1e-10));
        let sq = taylor_delta_apply(&t, &"square".parse().unwrap(), 2).unwrap();
        assert!(close(&sq.matrix, &(t.matrix() * t.matrix()), 1e-13));
    }

    #[test]
    fn taylor_divergence_flag() {
        let t = HermitianOperator::diagonal(&[-2.0, 0.5]).unwrap();
        let s = taylor_delta_apply(&t, &ScalarFunction::reciprocal(c(1.0)), 10).unwrap();
        let w = s.warning.unwrap();
        assert_eq!(w.radius, 1.0);
        assert!((w.spectral_radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_by_eigenvectors_diagonalizes() {
        let t = viola();
        let v = t.spectrum().unwrap().vectors().clone();
        let d = conjugate(&t, &v).unwrap();
        let expect = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0), c(-1.0), c(2.0)]));
        assert!(close(d.matrix(), &expect, 1e-12));
        assert!(close(conjugate(&t, &CMatrix::identity(3, 3)).unwrap().matrix(), t.matrix(), 0.0));
        let bad = CMatrix::identity(3, 3) * c(1.1);
        assert!(matches!(conjugate(&t, &bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn conjugate_permutation_on_diagonal() {
        let t = HermitianOperator::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let p = CMatrix::from_fn(3, 3, |i, j| c(if (i + 1) % 3 == j { 1.0 } else { 0.0 }));
        let q = conjugate(&t, &p).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| q.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn adjoint_of_complex_function() {
        let t = random_hermitian(5, 7);
        let f = ScalarFunction::exponential(Complex64::new(0.2, 1.0));
        let a = apply(&t, &f, &CalculusMethod::Eigen).unwrap();
        let b = apply(&t, &f.conj(), &CalculusMethod::Eigen).unwrap();
        assert!(close(&a.adjoint(), &b, 1e-12));
    }

    #[test]
    fn parse_short_forms() {
        assert_eq!("gaussian".parse::<ScalarFunction>().unwrap(), ScalarFunction::gaussian(0.0, 1.0));
        assert_eq!("poly:1,0,2".parse::<ScalarFunction>().unwrap(), ScalarFunction::polynomial(vec![1.0, 0.0, 2.0]));
        assert_eq!(
            r#"{"kind":"gaussian","center":0,"width":1}"#.parse::<ScalarFunction>().unwrap(),
            ScalarFunction::gaussian(0.0, 1.0)
        );
        let e: ScalarFunction = r#"{"kind":"exponential","scale":[0,1]}"#.parse().unwrap();
        assert_eq!(e, ScalarFunction::exponential(Complex64::new(0.0, 1.0)));
        assert!("gaussian:0,-1".parse::<ScalarFunction>().is_err());
        assert!("nope".parse::<ScalarFunction>().is_err());
    }

    #[test]
    fn integration_order_exchange() {
        let t = viola();
        let k = SmoothingKernel::gaussian(0.2).unwrap();
        let grid = k.grid_for(t.spectrum().unwrap(), 9.0);
        let grid: Vec<f64> = grid.iter().step_by(8).copied().collect();
        let g = |l: f64, m: f64| Complex64::new((-(l * l + 0.5 * m * m + 0.3 * l * m)).exp(), 0.0);
        let a = iterated_pairing(&t, g, &k, &grid, &grid, IntegrationOrder::LambdaFirst).unwrap();
        let b = iterated_pairing(&t, g, &k, &grid, &grid, IntegrationOrder::MuFirst).unwrap();
        assert!(close(&a, &b, 1e-10));
    }
}
