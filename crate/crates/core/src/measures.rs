//! Spectral family `E_λ`, the projection-valued measure `E(A)` on finite
//! unions of intervals, and Stone's formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::lorentzian_delta;
use crate::operator::HermitianOperator;
use crate::quadrature::{linspace, trapezoid_weights};
use crate::{CMatrix, CVector};

/// `E_λ = Σ_{λ_i ≤ λ} P_i`.
///
/// Right-continuous: an eigenvalue equal to `λ` (within the cluster
/// tolerance) is included.
pub fn spectral_family(op: &HermitianOperator, lambda: f64) -> Result<CMatrix> {
    let spec = op.spectrum()?;
    let tol = spec.cluster_tol();
    Ok(spec.apply_cluster_fn(|mu| indicator(mu <= lambda + tol)))
}

/// `E_λ v` without forming `E_λ`.
pub fn spectral_family_action(op: &HermitianOperator, lambda: f64, v: &CVector) -> Result<CVector> {
    let spec = op.spectrum()?;
    if v.len() != spec.dim() {
        return Err(Error::DimensionMismatch { left: spec.dim(), right: v.len() });
    }
    let tol = spec.cluster_tol();
    Ok(spec.apply_cluster_fn_to_vector(|mu| indicator(mu <= lambda + tol), v))
}

fn indicator(b: bool) -> Complex64 {
    Complex64::new(if b { 1.0 } else { 0.0 }, 0.0)
}

/// One interval with independent open/closed endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub a_closed: bool,
    #[serde(default)]
    pub b_closed: bool,
}

impl Interval {
    pub fn open(a: f64, b: f64) -> Self {
        Self { a, b, a_closed: false, b_closed: false }
    }

    pub fn closed(a: f64, b: f64) -> Self {
        Self { a, b, a_closed: true, b_closed: true }
    }

    /// Membership with endpoints compared up to `tol`.
    pub fn contains(&self, mu: f64, tol: f64) -> bool {
        let at_a = (mu - self.a).abs() <= tol;
        let at_b = (mu - self.b).abs() <= tol;
        if at_a || at_b {
            return (at_a && self.a_closed) || (at_b && self.b_closed);
        }
        mu > self.a && mu < self.b
    }
}

/// Finite disjoint union of intervals in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct BorelSet {
    intervals: Vec<Interval>,
}

impl BorelSet {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            if !(iv.a <= iv.b) || !iv.a.is_finite() || !iv.b.is_finite() {
                return Err(Error::Parameter(format!("interval endpoints out of order: ({}, {})", iv.a, iv.b)));
            }
        }
        for w in intervals.windows(2) {
            let (p, q) = (w[0], w[1]);
            let touching = p.b == q.a && p.b_closed && q.a_closed;
            if p.b > q.a || touching {
                return Err(Error::Parameter(format!(
                    "intervals must be disjoint and ascending: [{}, {}] then [{}, {}]",
                    p.a, p.b, q.a, q.b
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn interval(iv: Interval) -> Result<Self> {
        Self::new(vec![iv])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, mu: f64, tol: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(mu, tol))
    }
}

impl TryFrom<Vec<Interval>> for BorelSet {
    type Error = Error;
    fn try_from(v: Vec<Interval>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BorelSet> for Vec<Interval> {
    fn from(s: BorelSet) -> Self {
        s.intervals
    }
}

/// `E(A) = Σ_{λ_i ∈ A} P_i` with exact endpoint semantics.
pub fn spectral_measure(op: &HermitianOperator, set: &BorelSet) -> Result<CMatrix> {
    let spec = op.spectrum()?;
    let tol = spec.cluster_tol();
    Ok(spec.apply_cluster_fn(|mu| indicator(set.contains(mu, tol))))
}

/// Decreasing widths for the `ε → 0⁺` limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    values: Vec<f64>,
    #[serde(default = "yes")]
    extrapolate: bool,
}

fn yes() -> bool {
    true
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self { values: vec![0.1, 0.05, 0.025, 0.0125], extrapolate: true }
    }
}

impl EpsilonSchedule {
    pub fn new(values: Vec<f64>, extrapolate: bool) -> Result<Self> {
        if values.is_empty() || values.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::Parameter("epsilon schedule must be non-empty and positive".into()));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Parameter("epsilon schedule must be strictly descending".into()));
        }
        if extrapolate && values.len() < 2 {
            return Err(Error::Parameter("extrapolation needs at least two epsilons".into()));
        }
        Ok(Self { values, extrapolate })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extrapolate(&self) -> bool {
        self.extrapolate
    }
}

/// Output of [`stone_formula`]: the limit estimate plus the raw value at
/// every schedule entry.
#[derive(Debug, Clone)]
pub struct StoneResult {
    pub matrix: CMatrix,
    pub per_epsilon: Vec<(f64, CMatrix)>,
}

/// Minimum trapezoid nodes per `ε` across the integration window.
pub const NODES_PER_EPSILON: f64 = 10.0;

/// `(1/2πi) ∫_a^b [R(λ - iε) - R(λ + iε)] dλ` at every `ε` of the schedule,
/// then Richardson-extrapolated to `ε → 0` assuming an `O(ε)` leading error.
///
/// The limit is `E((a, b)) + ½E({a}) + ½E({b})`. The λ-grid uses
/// `max(n_λ, 10·(b - a + 2ε)/ε)` nodes so the Lorentzian shoulders at the
/// endpoints are resolved.
pub fn stone_formula(
    op: &HermitianOperator,
    a: f64,
    b: f64,
    schedule: &EpsilonSchedule,
    n_lambda: usize,
) -> Result<StoneResult> {
    if !(a < b) {
        return Err(Error::Parameter(format!("need a < b, got a = {a}, b = {b}")));
    }
    if n_lambda < 200 {
        return Err(Error::Parameter(format!("n_lambda must be at least 200, got {n_lambda}")));
    }
    op.spectrum()?;
    let per_epsilon = schedule
        .values()
        .par_iter()
        .map(|&eps| stone_at(op, a, b, eps, n_lambda).map(|m| (eps, m)))
        .collect::<Result<Vec<_>>>()?;
    let matrix = if schedule.extrapolate() {
        let k = per_epsilon.len();
        let (e1, m1) = &per_epsilon[k - 2];
        let (e2, m2) = &per_epsilon[k - 1];
        richardson(m1, *e1, m2, *e2)
    } else {
        per_epsilon[per_epsilon.len() - 1].1.clone()
    };
    Ok(StoneResult { matrix, per_epsilon })
}

fn stone_at(op: &HermitianOperator, a: f64, b: f64, eps: f64, n_lambda: usize) -> Result<CMatrix> {
    let needed = (NODES_PER_EPSILON * (b - a + 2.0 * eps) / eps).ceil() as usize + 1;
    let grid = linspace(a, b, n_lambda.max(needed));
    let ws = trapezoid_weights(&grid);
    let n = op.dim();
    let mut acc = CMatrix::zeros(n, n);
    for (&l, &w) in grid.iter().zip(&ws) {
        acc += lorentzian_delta(op, l, eps)? * Complex64::new(w, 0.0);
    }
    Ok(acc)
}

/// Eliminates the `O(ε)` term from two estimates at `ε₁ > ε₂`.
pub fn richardson(coarse: &CMatrix, eps_coarse: f64, fine: &CMatrix, eps_fine: f64) -> CMatrix {
    let r = eps_coarse / eps_fine;
    (fine * Complex64::new(r, 0.0) - coarse) / Complex64::new(r - 1.0, 0.0)
}

/// `(1/π)[atan((b - μ)/ε) - atan((a - μ)/ε)]`, the exact weight Stone's
/// integral assigns to an eigenvalue `μ` at width `ε`.
pub fn arctan_weight(mu: f64, a: f64, b: f64, eps: f64) -> f64 {
    (((b - mu) / eps).atan() - ((a - mu) / eps).atan()) / PI
}

/// `Σ_i arctan_weight(λ_i, a, b, ε) P_i`.
pub fn stone_weights_oracle(op: &HermitianOperator, a: f64, b: f64, eps: f64) -> Result<CMatrix> {
    let spec = op.spectrum()?;
    Ok(spec.apply_fn(|mu| Complex64::new(arctan_weight(mu, a, b, eps), 0.0)))
}
