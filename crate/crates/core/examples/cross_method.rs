//! One function, four routes: eigen, Dunford, time quadrature and the
//! resolvent limit, with their refinement ladders.

use num_complex::Complex64;
use spectral_delta::functional_calculus::{apply, route_gap, CalculusMethod, ScalarFunction};
use spectral_delta::kernels::{delta_derivative_pairing, square_split_apply, SmoothingKernel};
use spectral_delta::quadrature::linspace;
use spectral_delta::HermitianOperator;

fn main() -> spectral_delta::Result<()> {
    let m = HermitianOperator::from_real_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]])?;
    let f = ScalarFunction::gaussian(0.0, 1.0);
    let exact = apply(&m, &f, &CalculusMethod::Eigen)?;

    for n in [32, 64, 128] {
        let r = apply(&m, &f, &CalculusMethod::dunford_for(&m, n)?)?;
        println!("dunford {n:>3} nodes      {:.2e}", route_gap(&r, &exact));
    }
    let tq = CalculusMethod::time_quadrature_for(&m, &f)?;
    println!("time quadrature {tq:?}: {:.2e}", route_gap(&apply(&m, &f, &tq)?, &exact));
    for s in [0.04, 0.02, 0.01] {
        let rl = CalculusMethod::resolvent_limit_for(&m, SmoothingKernel::gaussian(s)?)?;
        println!("resolvent limit sigma={s:<5} {:.2e}", route_gap(&apply(&m, &f, &rl)?, &exact));
    }

    let fprime = m.spectrum()?.apply_fn(|l| -f.derivative_real(l));
    for s in [0.08, 0.04, 0.02] {
        let k = SmoothingKernel::gaussian(s)?;
        let d = delta_derivative_pairing(&m, |l| f.eval_real(l), &k, &k.grid_for(m.spectrum()?, 10.0))?;
        println!("derivative pairing sigma={s:<5} gap to -f'(M) {:.2e}", route_gap(&d, &fprime));
    }

    let t = HermitianOperator::diagonal(&[1.0, -1.0])?;
    let k = SmoothingKernel::gaussian(0.01)?;
    let split = square_split_apply(&t, |l| Complex64::new(l, 0.0), &k, &linspace(0.25, 2.25, 20001))?;
    println!("square split on diag(1,-1) with f(x)=x: {:.5} {:.5}", split[(0, 0)].re, split[(1, 1)].re);
    Ok(())
}
