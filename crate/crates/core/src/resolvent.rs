//! Resolvents, contour-integral functional calculus and the Laplace-transform
//! representation of the resolvent.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{max_abs, HermitianOperator};
use crate::quadrature::trapezoid_weights;
use crate::{quadrature, CMatrix};

/// Relative distance to the spectrum below which `zI - T` counts as singular.
pub const SINGULAR_RTOL: f64 = 1e-10;

/// Default number of nodes for contour quadrature.
pub const DEFAULT_CONTOUR_NODES: usize = 256;

/// `R(z, T) = (zI - T)^{-1}` at one point.
#[derive(Debug, Clone)]
pub struct ResolventSample {
    pub z: Complex64,
    pub matrix: CMatrix,
}

impl ResolventSample {
    /// `max |(zI - T) R - I|`.
    pub fn residual(&self, op: &HermitianOperator) -> f64 {
        let n = op.dim();
        let shifted = shifted_operator(op, self.z);
        max_abs(&(shifted * &self.matrix - CMatrix::identity(n, n)))
    }
}

fn shifted_operator(op: &HermitianOperator, z: Complex64) -> CMatrix {
    let n = op.dim();
    CMatrix::identity(n, n) * z - op.matrix()
}

/// Dense LU solve of `A X = I`.
pub(crate) fn invert(a: CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let lu = a.lu();
    let x = lu.solve(&CMatrix::identity(n, n)).ok_or(Error::SingularSolve)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularSolve);
    }
    Ok(x)
}

/// Solves `(zI - T) X = I` by LU.
///
/// Fails with [`Error::SpectrumHit`] when `z` is within
/// `1e-10·max(‖T‖, 1)` of an eigenvalue.
pub fn resolvent(op: &HermitianOperator, z: Complex64) -> Result<ResolventSample> {
    let spec = op.spectrum()?;
    let distance = spec.distance_to_spectrum(z);
    if distance <= SINGULAR_RTOL * spec.spectral_radius().max(1.0) {
        return Err(Error::SpectrumHit { z, distance });
    }
    let matrix = invert(shifted_operator(op, z))?;
    Ok(ResolventSample { z, matrix })
}

/// Closed quadrature contour in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Contour {
    Circle {
        #[serde(with = "complex_pair")]
        center: Complex64,
        radius: f64,
        #[serde(rename = "nodes", default = "default_nodes")]
        n_nodes: usize,
    },
    /// Axis-aligned rectangle traversed counter-clockwise.
    Rectangle {
        #[serde(with = "complex_pair")]
        lower_left: Complex64,
        #[serde(with = "complex_pair")]
        upper_right: Complex64,
        #[serde(rename = "nodes", default = "default_nodes")]
        n_nodes: usize,
    },
}

fn default_nodes() -> usize {
    DEFAULT_CONTOUR_NODES
}

/// One quadrature node: position and `z'(θ) dθ` weight.
#[derive(Debug, Clone, Copy)]
pub struct ContourNode {
    pub z: Complex64,
    pub dz: Complex64,
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64, n_nodes: usize) -> Result<Self> {
        let c = Contour::Circle { center, radius, n_nodes };
        c.validate()?;
        Ok(c)
    }

    pub fn rectangle(lower_left: Complex64, upper_right: Complex64, n_nodes: usize) -> Result<Self> {
        let c = Contour::Rectangle { lower_left, upper_right, n_nodes };
        c.validate()?;
        Ok(c)
    }

    /// Circle around `[lo, hi]` with clearance `pad` on each side.
    pub fn enclosing(lo: f64, hi: f64, pad: f64, n_nodes: usize) -> Result<Self> {
        Self::circle(Complex64::new(0.5 * (lo + hi), 0.0), 0.5 * (hi - lo) + pad, n_nodes)
    }

    pub fn n_nodes(&self) -> usize {
        match *self {
            Contour::Circle { n_nodes, .. } | Contour::Rectangle { n_nodes, .. } => n_nodes,
        }
    }

    pub fn with_nodes(self, n: usize) -> Self {
        match self {
            Contour::Circle { center, radius, .. } => Contour::Circle { center, radius, n_nodes: n },
            Contour::Rectangle { lower_left, upper_right, .. } => {
                Contour::Rectangle { lower_left, upper_right, n_nodes: n }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes() < 16 {
            return Err(Error::Parameter(format!("contour needs at least 16 nodes, got {}", self.n_nodes())));
        }
        match *self {
            Contour::Circle { radius, center, .. } => {
                if !(radius > 0.0) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
                    return Err(Error::Parameter(format!("circle radius must be positive, got {radius}")));
                }
            }
            Contour::Rectangle { lower_left, upper_right, .. } => {
                if !(upper_right.re > lower_left.re && upper_right.im > lower_left.im) {
                    return Err(Error::Parameter("rectangle corners must be lower-left then upper-right".into()));
                }
            }
        }
        Ok(())
    }

    fn perimeter(&self) -> f64 {
        match *self {
            Contour::Circle { radius, .. } => 2.0 * PI * radius,
            Contour::Rectangle { lower_left, upper_right, .. } => {
                let d = upper_right - lower_left;
                2.0 * (d.re + d.im)
            }
        }
    }

    /// Arc length between consecutive nodes.
    pub fn node_spacing(&self) -> f64 {
        self.perimeter() / self.n_nodes() as f64
    }

    /// Distance from a real point to the contour curve.
    pub fn distance_to(&self, lambda: f64) -> f64 {
        match *self {
            Contour::Circle { center, radius, .. } => ((Complex64::new(lambda, 0.0) - center).norm() - radius).abs(),
            Contour::Rectangle { lower_left, upper_right, .. } => {
                let (x0, x1, y0, y1) = (lower_left.re, upper_right.re, lower_left.im, upper_right.im);
                let dx = if lambda < x0 {
                    x0 - lambda
                } else if lambda > x1 {
                    lambda - x1
                } else {
                    0.0
                };
                let inside_x = dx == 0.0;
                if inside_x && y0 <= 0.0 && y1 >= 0.0 {
                    // inside or on the boundary
                    let to_side = (lambda - x0).min(x1 - lambda);
                    to_side.min(y0.abs()).min(y1.abs())
                } else {
                    let dy = if 0.0 < y0 {
                        y0
                    } else if 0.0 > y1 {
                        -y1
                    } else {
                        0.0
                    };
                    (dx * dx + dy * dy).sqrt()
                }
            }
        }
    }

    /// Winding test for a real point.
    pub fn encloses(&self, lambda: f64) -> bool {
        match *self {
            Contour::Circle { center, radius, .. } => (Complex64::new(lambda, 0.0) - center).norm() < radius,
            Contour::Rectangle { lower_left, upper_right, .. } => {
                lambda > lower_left.re && lambda < upper_right.re && lower_left.im < 0.0 && upper_right.im > 0.0
            }
        }
    }

    /// Whether a complex point lies strictly inside the contour.
    pub fn winds_around(&self, z: Complex64) -> bool {
        match *self {
            Contour::Circle { center, radius, .. } => (z - center).norm() < radius,
            Contour::Rectangle { lower_left, upper_right, .. } => {
                z.re > lower_left.re && z.re < upper_right.re && z.im > lower_left.im && z.im < upper_right.im
            }
        }
    }

    /// Quadrature nodes in counter-clockwise order.
    pub fn nodes(&self) -> Vec<ContourNode> {
        let n = self.n_nodes();
        match *self {
            Contour::Circle { center, radius, .. } => {
                let dtheta = 2.0 * PI / n as f64;
                (0..n)
                    .map(|k| {
                        let e = Complex64::from_polar(1.0, dtheta * k as f64);
                        ContourNode { z: center + e * radius, dz: Complex64::i() * e * radius * dtheta }
                    })
                    .collect()
            }
            Contour::Rectangle { lower_left, upper_right, .. } => {
                let ll = lower_left;
                let lr = Complex64::new(upper_right.re, lower_left.im);
                let ur = upper_right;
                let ul = Complex64::new(lower_left.re, upper_right.im);
                let sides = [(ll, lr), (lr, ur), (ur, ul), (ul, ll)];
                let per = self.perimeter();
                let mut out = Vec::with_capacity(n + 4);
                for (a, b) in sides {
                    let len = (b - a).norm();
                    let m = ((n as f64 * len / per).round() as usize).max(2);
                    let ts = quadrature::linspace(0.0, 1.0, m + 1);
                    let ws = trapezoid_weights(&ts);
                    for (t, w) in ts.iter().zip(ws) {
                        out.push(ContourNode { z: a + (b - a) * *t, dz: (b - a) * w });
                    }
                }
                out
            }
        }
    }
}

/// `(1/2πi) ∮ f(z) R(z, T) dz` by the trapezoid rule on the contour.
///
/// On a circle the rule converges exponentially for analytic `f`; the
/// result is `Σ f(λ_i) P_i` over the enclosed eigenvalues.
pub fn dunford_apply<F>(op: &HermitianOperator, f: F, contour: &Contour) -> Result<CMatrix>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    contour.validate()?;
    let spec = op.spectrum()?;
    let margin = 2.0 * contour.node_spacing();
    let closest = spec.eigenvalues().iter().map(|&l| contour.distance_to(l)).fold(f64::INFINITY, f64::min);
    if closest < margin {
        return Err(Error::ContourTooClose { distance: closest, margin });
    }
    let nodes = contour.nodes();
    let terms: Vec<CMatrix> = nodes
        .par_iter()
        .map(|node| resolvent(op, node.z).map(|r| r.matrix * (f(node.z) * node.dz)))
        .collect::<Result<_>>()?;
    let n = op.dim();
    let mut acc = CMatrix::zeros(n, n);
    for t in &terms {
        acc += t;
    }
    Ok(acc / Complex64::new(0.0, 2.0 * PI))
}

/// `(1/2πi) ∮ f(z) g(z) dz` for scalar integrands, same rule as
/// [`dunford_apply`].
pub fn contour_integral_scalar<F: Fn(Complex64) -> Complex64>(f: F, contour: &Contour) -> Complex64 {
    let s: Complex64 = contour.nodes().iter().map(|nd| f(nd.z) * nd.dz).sum();
    s / Complex64::new(0.0, 2.0 * PI)
}

/// `R(z, T) = -i ∫_0^∞ e^{izt} e^{-itT} dt`, truncated to `[0, t_cut]` and
/// integrated with `n_t` trapezoid nodes.
///
/// Needs `Im z > 0` and `t_cut ≥ 40 / Im z`; the truncation error is then
/// below `e^{-40} / Im z`.
pub fn hille_yosida_resolvent(op: &HermitianOperator, z: Complex64, t_cut: f64, n_t: usize) -> Result<CMatrix> {
    if !(z.im > 0.0) {
        return Err(Error::Parameter(format!("Im z must be positive, got {}", z.im)));
    }
    if !(t_cut >= 40.0 / z.im) {
        return Err(Error::Parameter(format!("t_cut = {t_cut} is below 40 / Im z = {}", 40.0 / z.im)));
    }
    if n_t < 16 {
        return Err(Error::Parameter(format!("n_t must be at least 16, got {n_t}")));
    }
    let spec = op.spectrum()?;
    let ts = quadrature::linspace(0.0, t_cut, n_t);
    let ws = trapezoid_weights(&ts);
    // e^{-itT} = Σ e^{-itλ_i} P_i, so the time integral reduces to one
    // scalar quadrature per eigenvalue.
    let minus_i = Complex64::new(0.0, -1.0);
    Ok(spec.apply_fn(|l| ts.iter().zip(&ws).map(|(&t, &w)| minus_i * ((z - l) * Complex64::i() * t).exp() * w).sum()))
}

pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::*;

    fn viola_closed_form(z: Complex64) -> CMatrix {
        let s = Complex64::new(1.0, 0.0) / (z * z - z - 2.0);
        CMatrix::from_fn(3, 3, |i, j| if i == j { (z - 1.0) * s } else { s })
    }

    #[test]
    fn scalar_resolvent_at_i() {
        let t = HermitianOperator::from_real_rows(&[vec![0.0]]).unwrap();
        let r = resolvent(&t, Complex64::i()).unwrap();
        assert!((r.matrix[(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn viola_resolvent_matches_closed_form() {
        let m = viola();
        for z in [Complex64::new(0.3, 0.7), Complex64::new(5.0, 0.0), Complex64::new(-1.0, 1e-3)] {
            let r = resolvent(&m, z).unwrap();
            assert!(max_abs(&(&r.matrix - viola_closed_form(z))) < 1e-10 * max_abs(&r.matrix));
            assert!(r.residual(&m) < 1e-9);
        }
    }

    #[test]
    fn resolvent_on_eigenvalue_is_rejected() {
        let err = resolvent(&viola(), Complex64::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::SpectrumHit { .. }));
    }

    #[test]
    fn dunford_projector_on_unit_circle_around_minus_one() {
        let c = Contour::circle(Complex64::new(-1.0, 0.0), 1.0, 256).unwrap();
        let p = dunford_apply(&viola(), |_| Complex64::new(1.0, 0.0), &c).unwrap();
        assert!(max_abs(&(p - viola_p_minus1())) < 1e-8);
    }

    #[test]
    fn scalar_residues() {
        let circle = Contour::circle(Complex64::new(-1.0, 0.0), 1.0, 256).unwrap();
        let denom = |z: Complex64| (z + 1.0) * (z - 2.0);
        let a = contour_integral_scalar(|z| Complex64::new(1.0, 0.0) / denom(z), &circle);
        let b = contour_integral_scalar(|z| (z - 1.0) / denom(z), &circle);
        assert!((a - c(-1.0 / 3.0)).norm() < 1e-12);
        assert!((b - c(2.0 / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn dunford_identity_function_recovers_operator() {
        let m = viola();
        let circle = Contour::enclosing(-1.0, 2.0, 1.0, 256).unwrap();
        let t = dunford_apply(&m, |z| z, &circle).unwrap();
        assert!(max_abs(&(t - m.matrix())) < 1e-10);
    }

    #[test]
    fn contour_too_close() {
        // spacing = 2π/16 ≈ 0.39, margin ≈ 0.79; eigenvalue 2 sits 0.5 from the circle
        let c = Contour::circle(Complex64::new(-1.0, 0.0), 2.5, 16).unwrap();
        let err = dunford_apply(&viola(), |_| c64(1.0), &c).unwrap_err();
        assert!(matches!(err, Error::ContourTooClose { .. }));
    }

    fn c64(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rectangle_contour_projector() {
        let rect = Contour::rectangle(Complex64::new(-2.0, -1.0), Complex64::new(0.5, 1.0), 4096).unwrap();
        let p = dunford_apply(&viola(), |_| c64(1.0), &rect).unwrap();
        // corners make the rule only algebraically convergent
        assert!(max_abs(&(p - viola_p_minus1())) < 1e-4);
    }

    #[test]
    fn hille_yosida_scalar() {
        let t = HermitianOperator::from_real_rows(&[vec![0.0]]).unwrap();
        let r = hille_yosida_resolvent(&t, Complex64::new(0.0, 2.0), 20.0, 200_001).unwrap();
        assert!((r[(0, 0)] - Complex64::new(0.0, -0.5)).norm() < 1e-8);
    }

    #[test]
    fn hille_yosida_viola() {
        let m = viola();
        let z = Complex64::new(1.0, 3.0);
        let hy = hille_yosida_resolvent(&m, z, 40.0 / 3.0 + 1.0, 20_001).unwrap();
        let r = resolvent(&m, z).unwrap();
        assert!(max_abs(&(hy - r.matrix)) < 1e-6);
    }

    #[test]
    fn hille_yosida_rejects_real_z() {
        let err = hille_yosida_resolvent(&viola(), c64(3.0), 100.0, 100).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn contour_json_shape() {
        let c: Contour = serde_json::from_str(r#"{"kind":"circle","center":[-1,0],"radius":1,"nodes":64}"#).unwrap();
        assert_eq!(c, Contour::Circle { center: c64(-1.0), radius: 1.0, n_nodes: 64 });
    }
}
