//! Structural invariants on seeded random Hermitian matrices.

use num_complex::Complex64;
use spectral_delta::functional_calculus::conjugate;
use spectral_delta::kernels::{lorentzian_delta, smoothed_pairing, SmoothingKernel};
use spectral_delta::measures::spectral_family;
use spectral_delta::operator::max_abs;
use spectral_delta::random::{random_hermitian, random_unitary, rng};
use spectral_delta::resolvent::resolvent;
use spectral_delta::CMatrix;

fn main() -> spectral_delta::Result<()> {
    let mut r = rng(42);
    for n in [1, 4, 9, 16] {
        let t = random_hermitian(n, &mut r);
        let spec = t.spectrum()?;
        let k = SmoothingKernel::gaussian(0.1)?;
        let mass = smoothed_pairing(&t, |_| Complex64::new(1.0, 0.0), &k, &k.grid_for(spec, 10.0))?;
        let e = spectral_family(&t, 0.0)?;
        let u = random_unitary(n, &mut r);
        let lhs = lorentzian_delta(&conjugate(&t, &u)?, 0.2, 0.1)?;
        let rhs = u.adjoint() * lorentzian_delta(&t, 0.2, 0.1)? * &u;
        let (z, w) = (Complex64::new(0.3, 1.0), Complex64::new(-0.4, -0.5));
        let rz = resolvent(&t, z)?.matrix;
        let rw = resolvent(&t, w)?.matrix;
        println!(
            "n={n:>2}: mass {:.1e}, E^2-E {:.1e}, conjugation {:.1e}, resolvent identity {:.1e}",
            max_abs(&(mass - CMatrix::identity(n, n))),
            max_abs(&(&e * &e - &e)),
            max_abs(&(lhs - rhs)),
            max_abs(&(&rz - &rw - &rz * &rw * (w - z))),
        );
    }
    Ok(())
}
