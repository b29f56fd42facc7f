//! Momentum on the circle: the spectral family truncates the Fourier
//! series at `n ≤ [λ]`. Also the position operator's diagonal delta.

use num_complex::Complex64;
use spectral_delta::kernels::{lorentzian_delta, SmoothingKernel};
use spectral_delta::measures::spectral_family_action;
use spectral_delta::models::{
    bounded_fourier_coefficients, bounded_modes, bounded_momentum_family, build_bounded_momentum, build_position,
    Grid1D,
};
use spectral_delta::operator::max_abs;
use std::f64::consts::PI;

fn main() -> spectral_delta::Result<()> {
    let modes = 11;
    let samples: Vec<Complex64> = (0..128)
        .map(|j| {
            let x = -PI + 2.0 * PI * j as f64 / 128.0;
            Complex64::new((x.cos() + 0.3 * (2.0 * x).sin()).exp(), 0.0)
        })
        .collect();
    let coeffs = bounded_fourier_coefficients(&samples, modes);
    let s = build_bounded_momentum(modes)?;
    for lambda in [-2.5, 0.0, 1.5, 3.2] {
        let kept: Vec<i64> = bounded_modes(modes)
            .into_iter()
            .zip(bounded_momentum_family(&coeffs, lambda).iter())
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, _)| k)
            .collect();
        let gap = max_abs(&(bounded_momentum_family(&coeffs, lambda) - spectral_family_action(&s, lambda, &coeffs)?));
        println!("lambda {lambda:+}: modes kept {:?}..{:?}, gap to projector {gap:.1e}", kept.first(), kept.last());
    }

    let grid = Grid1D::new(10, 2.0, false)?;
    let q = build_position(&grid);
    let d = lorentzian_delta(&q, 0.3, 0.2)?;
    let k = SmoothingKernel::lorentzian(0.2)?;
    let off: f64 = (0..10)
        .flat_map(|i| (0..10).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| d[(i, j)].norm())
        .fold(0.0, f64::max);
    println!("position delta: max off-diagonal {off:.1e}");
    for i in [0, 5, 9] {
        println!("  x={:+.1}: {:.6} vs {:.6}", grid.point(i), d[(i, i)].re, k.value(0.3 - grid.point(i)));
    }
    Ok(())
}
