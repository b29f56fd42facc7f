//! Stone's formula: spectral projections from resolvent boundary values,
//! with half weights at eigenvalues sitting on an endpoint.

use num_complex::Complex64;
use spectral_delta::measures::{arctan_weight, stone_formula, stone_weights_oracle, EpsilonSchedule};
use spectral_delta::operator::max_abs;
use spectral_delta::{CMatrix, HermitianOperator};

fn main() -> spectral_delta::Result<()> {
    let t = HermitianOperator::diagonal(&[0.0, 1.0, 3.0])?;
    let schedule = EpsilonSchedule::new(vec![0.04, 0.02, 0.01], true)?;
    let s = stone_formula(&t, 0.0, 1.0, &schedule, 2000)?;
    for (eps, m) in &s.per_epsilon {
        let oracle = stone_weights_oracle(&t, 0.0, 1.0, *eps)?;
        println!(
            "eps {eps:<5} diag {:.5} {:.5} {:.5}, quadrature error {:.1e}",
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(2, 2)].re,
            max_abs(&(m - oracle))
        );
    }
    let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(0.5, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.0),
    ]));
    println!("extrapolated gap to P0/2 + P1/2: {:.2e}", max_abs(&(s.matrix - want)));
    println!(
        "arctan weights at eps=1e-9: endpoint {:.6}, inside {:.6}, outside {:.1e}",
        arctan_weight(0.0, 0.0, 1.0, 1e-9),
        arctan_weight(0.5, 0.0, 1.0, 1e-9),
        arctan_weight(3.0, 0.0, 1.0, 1e-9)
    );
    Ok(())
}
