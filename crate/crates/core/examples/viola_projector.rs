//! The lower eigenprojector of the all-ones-off-diagonal 3×3 matrix by
//! three independent routes.

use num_complex::Complex64;
use spectral_delta::golden::viola_lower_projector;
use spectral_delta::measures::{stone_formula, EpsilonSchedule};
use spectral_delta::operator::max_abs;
use spectral_delta::resolvent::{dunford_apply, Contour};
use spectral_delta::HermitianOperator;

fn main() -> spectral_delta::Result<()> {
    let m = HermitianOperator::from_real_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]])?;
    let p = viola_lower_projector();

    let spec = m.spectrum()?;
    println!("eigenvalues {:?}", spec.eigenvalues());
    for e in spec.eigenprojectors() {
        println!("lambda = {:+.3}, multiplicity {}", e.eigenvalue, e.multiplicity);
        if (e.eigenvalue + 1.0).abs() < 1e-8 {
            println!("  eigen route gap      {:.2e}", max_abs(&(&e.projector - &p)));
        }
    }

    let circle = Contour::circle(Complex64::new(-1.0, 0.0), 1.0, 256)?;
    let dun = dunford_apply(&m, |_| Complex64::new(1.0, 0.0), &circle)?;
    println!("  contour |z+1|=1 gap  {:.2e}", max_abs(&(dun - &p)));

    let stone = stone_formula(&m, -2.0, 0.0, &EpsilonSchedule::default(), 2000)?;
    for (eps, raw) in &stone.per_epsilon {
        println!("  stone eps={eps:<7} gap {:.2e}", max_abs(&(raw - &p)));
    }
    println!("  stone extrapolated   {:.2e}", max_abs(&(stone.matrix - &p)));
    Ok(())
}
