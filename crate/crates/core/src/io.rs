//! Matrix and vector file formats.
//!
//! Matrices are JSON objects `{"n": int, "entries": [[x, ...], ...]}` in
//! row-major order, where each entry is either `[re, im]` or a plain real
//! number. Writers always emit `[re, im]` pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::{CMatrix, CVector};

/// Hermiticity tolerance applied to matrices read from files.
pub const FILE_HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    entries: Vec<Vec<Entry>>,
}

/// Parses the JSON matrix format.
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    if file.n == 0 {
        return Err(Error::Empty);
    }
    if file.entries.len() != file.n {
        return Err(Error::Format(format!("n = {} but {} rows given", file.n, file.entries.len())));
    }
    if let Some(row) = file.entries.iter().find(|r| r.len() != file.n) {
        return Err(Error::NotSquare { rows: file.n, cols: row.len() });
    }
    Ok(CMatrix::from_fn(file.n, file.n, |i, j| file.entries[i][j].into()))
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

/// Reads and validates a Hermitian operator with
/// [`FILE_HERMITICITY_TOL`].
pub fn read_operator(path: &Path) -> Result<HermitianOperator> {
    HermitianOperator::new(read_matrix(path)?, FILE_HERMITICITY_TOL)
}

/// JSON value of a matrix as nested `[re, im]` pairs.
pub fn matrix_to_json(m: &CMatrix) -> Value {
    let entries: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    serde_json::json!({ "n": m.nrows(), "entries": entries })
}

pub fn complex_to_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

/// Parses a vector given as `e<k>` (1-based unit vector), `ones`, a
/// comma-separated list of reals, or a JSON array of numbers or
/// `[re, im]` pairs.
pub fn parse_vector(spec: &str, n: usize) -> Result<CVector> {
    let s = spec.trim();
    if let Some(k) = s.strip_prefix('e') {
        let k: usize = k.parse().map_err(|_| Error::Parameter(format!("bad unit vector `{s}`")))?;
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("unit vector index {k} outside 1..={n}")));
        }
        return Ok(CVector::from_fn(n, |i, _| Complex64::new(if i + 1 == k { 1.0 } else { 0.0 }, 0.0)));
    }
    if s == "ones" {
        return Ok(CVector::from_element(n, Complex64::new(1.0, 0.0)));
    }
    let values: Vec<Complex64> = if s.starts_with('[') {
        let entries: Vec<Entry> = serde_json::from_str(s)?;
        entries.into_iter().map(Into::into).collect()
    } else {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map(|re| Complex64::new(re, 0.0))
                    .map_err(|e| Error::Parameter(format!("`{x}`: {e}")))
            })
            .collect::<Result<_>>()?
    };
    if values.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: values.len() });
    }
    Ok(CVector::from_vec(values))
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("`{x}`: {e}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parameter(format!("expected `re` or `re,im`, got `{s}`"))),
    }
}

/// Parses the grid syntax `a:b:n`, `n` points including both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(Error::Grid(format!("expected a:b:n, got `{s}`")));
    };
    let a: f64 = a.trim().parse().map_err(|_| Error::Grid(format!("bad start in `{s}`")))?;
    let b: f64 = b.trim().parse().map_err(|_| Error::Grid(format!("bad end in `{s}`")))?;
    let n: usize = n.trim().parse().map_err(|_| Error::Grid(format!("bad count in `{s}`")))?;
    if n < 2 || !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Grid(format!("need a < b and n >= 2 in `{s}`")));
    }
    Ok(crate::quadrature::linspace(a, b, n))
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("`{x}`: {e}")))).collect()
}
