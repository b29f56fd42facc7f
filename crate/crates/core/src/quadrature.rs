//! Composite trapezoid rule and uniform grids.
//!
//! Every numerical integral in the crate goes through [`trapezoid_weights`],
//! so the error model is the same everywhere: O(h²) for smooth integrands,
//! spectral for periodic or rapidly decaying ones.

use crate::error::{Error, Result};

/// `n` uniformly spaced points on `[a, b]`, both endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|k| if k == n - 1 { b } else { a + h * k as f64 }).collect()
        }
    }
}

/// Rejects grids that are empty, non-finite or not strictly ascending.
pub fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Grid(format!("need at least 2 points, got {}", grid.len())));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Grid("non-finite grid point".into()));
    }
    if let Some(k) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!("not strictly ascending at index {}: {} then {}", k, grid[k], grid[k + 1])));
    }
    Ok(())
}

/// Trapezoid weights for an ascending, possibly non-uniform grid.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = grid[k + 1] - grid[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    w
}

/// Number of uniform nodes needed so that the spacing is at most `h`.
pub fn nodes_for_spacing(a: f64, b: f64, h: f64) -> usize {
    ((b - a) / h).ceil().max(1.0) as usize + 1
}

/// Requires `grid` to contain `[lo, hi]`.
pub fn check_coverage(grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if first > lo || last < hi {
        return Err(Error::Coverage { need_lo: lo, need_hi: hi, have_lo: first, have_hi: last });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(-1.0, 2.0, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[6], 2.0);
        assert!((g[1] - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let g = vec![0.0, 0.3, 1.0, 1.7, 2.0];
        let w = trapezoid_weights(&g);
        let integral: f64 = g.iter().zip(&w).map(|(x, w)| (3.0 * x + 1.0) * w).sum();
        assert!((integral - 8.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_ascending() {
        assert!(matches!(check_ascending(&[0.0, 1.0, 1.0]), Err(Error::Grid(_))));
        assert!(matches!(check_ascending(&[0.0]), Err(Error::Grid(_))));
        assert!(check_ascending(&[0.0, 1e-9]).is_ok());
    }
}
