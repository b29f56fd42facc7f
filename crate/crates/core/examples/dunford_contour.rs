//! Contour-integral functional calculus and its node-count convergence.

use num_complex::Complex64;
use spectral_delta::functional_calculus::{apply, route_gap, CalculusMethod, ScalarFunction};
use spectral_delta::resolvent::{contour_integral_scalar, Contour};
use spectral_delta::HermitianOperator;

fn main() -> spectral_delta::Result<()> {
    let t = HermitianOperator::diagonal(&[-1.0, 0.5, 2.0])?;
    let f = ScalarFunction::exponential(Complex64::new(1.0, 0.0));
    let exact = apply(&t, &f, &CalculusMethod::Eigen)?;
    for n in [32, 48, 64, 96, 128] {
        let m = apply(&t, &f, &CalculusMethod::dunford_for(&t, n)?)?;
        println!("exp(T) with {n:>3} nodes: gap {:.2e}", route_gap(&m, &exact));
    }

    // Residue of 1/((z+1)(z-2)) at -1.
    let circle = Contour::circle(Complex64::new(-1.0, 0.0), 1.0, 256)?;
    let r = contour_integral_scalar(|z| Complex64::new(1.0, 0.0) / ((z + 1.0) * (z - 2.0)), &circle);
    println!("residue at -1: {:.12} (exact -1/3)", r.re);

    // Corners break the exponential convergence of the periodic trapezoid
    // rule, so rectangles converge algebraically.
    for n in [400, 1600, 6400] {
        let rect = Contour::rectangle(Complex64::new(-2.0, -1.0), Complex64::new(3.0, 1.0), n)?;
        let m = apply(&t, &f, &CalculusMethod::Dunford { contour: rect })?;
        println!("rectangle contour, {n:>4} nodes: gap {:.2e}", route_gap(&m, &exact));
    }
    Ok(())
}
