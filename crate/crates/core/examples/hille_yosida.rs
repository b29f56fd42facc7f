//! The resolvent as the Laplace transform of the unitary group, compared
//! with a direct LU solve as the node count grows.

use num_complex::Complex64;
use spectral_delta::operator::max_abs;
use spectral_delta::resolvent::{hille_yosida_resolvent, resolvent};
use spectral_delta::HermitianOperator;

fn main() -> spectral_delta::Result<()> {
    let m = HermitianOperator::from_real_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]])?;
    let z = Complex64::new(1.0, 3.0);
    let direct = resolvent(&m, z)?.matrix;
    for n_t in [501, 2001, 8001, 20001] {
        let hy = hille_yosida_resolvent(&m, z, 40.0 / z.im, n_t)?;
        println!("n_t {n_t:>5}: gap {:.2e}", max_abs(&(hy - &direct)));
    }
    Ok(())
}
