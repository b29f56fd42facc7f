//! Pairing `f` with the formal moment series of the delta operator gives
//! the Taylor partial sum of `f(T)`.

use num_complex::Complex64;
use spectral_delta::functional_calculus::{apply, route_gap, taylor_delta_apply, CalculusMethod, ScalarFunction};
use spectral_delta::HermitianOperator;

fn main() -> spectral_delta::Result<()> {
    let m = HermitianOperator::from_real_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]])?;
    let f = ScalarFunction::exponential(Complex64::new(1.0, 0.0));
    let exact = apply(&m, &f, &CalculusMethod::Eigen)?;
    for n in [5, 10, 15, 20, 25, 30] {
        let s = taylor_delta_apply(&m, &f, n)?;
        println!("exp, N={n:>2}: gap {:.2e}", route_gap(&s.matrix, &exact));
    }
    let recip = ScalarFunction::reciprocal(Complex64::new(1.0, 0.0));
    let s = taylor_delta_apply(&m, &recip, 20)?;
    match s.warning {
        Some(w) => println!("1/(1-x): {w}"),
        None => println!("1/(1-x): converges"),
    }
    Ok(())
}
