//! Schmidt series for `(I - zK)x = y` with compact self-adjoint `K`.

use num_complex::Complex64;
use spectral_delta::models::{schmidt_resolve, schmidt_solve, CompactOperatorSpec};
use spectral_delta::operator::max_abs;
use spectral_delta::{CMatrix, CVector, Error};

fn main() -> spectral_delta::Result<()> {
    let mu: Vec<f64> = (1..=32).map(|k| (-1.0_f64).powi(k) / k as f64).collect();
    let k = CompactOperatorSpec::new(mu)?;
    let y = CVector::from_fn(k.dim(), |i, _| Complex64::new(1.0 / (i + 1) as f64, 0.0));
    let z = Complex64::new(0.7, 0.3);
    let x = schmidt_solve(&k, &y, z)?;
    let a = CMatrix::identity(k.dim(), k.dim()) - k.to_matrix() * z;
    println!("residual of (I - zK)x = y: {:.1e}", max_abs(&(a * &x - &y)));

    let r = schmidt_resolve(&k, &y, 0.6)?;
    println!("(0.6 I - K)^-1 y, first coefficients {:.4} {:.4}", r[0].re, r[1].re);

    match schmidt_solve(&k, &y, Complex64::new(-1.0, 0.0)) {
        Err(Error::SpectrumHit { z, distance }) => {
            println!("z = -1 hits 1/mu: SpectrumHit at {z}, distance {distance:.1e}")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
