//! The four calculus routes agree on random operators.

use num_complex::Complex64;
use spectral_delta::functional_calculus::{apply, route_gap, taylor_delta_apply, CalculusMethod, ScalarFunction};
use spectral_delta::kernels::{square_split_apply, SmoothingKernel};
use spectral_delta::operator::max_abs;
use spectral_delta::quadrature::linspace;
use spectral_delta::random::{random_hermitian, rng};
use spectral_delta::resolvent::{hille_yosida_resolvent, resolvent};
use spectral_delta::{Error, HermitianOperator};

fn seeded(n: usize, seed: u64) -> HermitianOperator {
    random_hermitian(n, &mut rng(seed))
}

#[test]
fn analytic_functions_on_every_route() {
    let fs = [
        ScalarFunction::gaussian(0.2, 0.8),
        ScalarFunction::LorentzianWeight { center: -0.3, width: 0.6 },
        ScalarFunction::PolyGaussian { coeffs: vec![1.0, 0.5, -0.25], center: 0.1, width: 1.1 },
    ];
    for seed in 0..6 {
        let t = seeded(2 + seed as usize, seed);
        for f in &fs {
            let exact = apply(&t, f, &CalculusMethod::Eigen).unwrap();
            let tq = apply(&t, f, &CalculusMethod::time_quadrature_for(&t, f).unwrap()).unwrap();
            assert!(route_gap(&exact, &tq) < 1e-5, "{} time quadrature", f.name());
            let k = SmoothingKernel::gaussian(0.01).unwrap();
            let rl = apply(&t, f, &CalculusMethod::resolvent_limit_for(&t, k).unwrap()).unwrap();
            assert!(route_gap(&exact, &rl) < 1e-3, "{} resolvent limit", f.name());
        }
        // Dunford needs f analytic inside the contour; the Lorentzian
        // weight has poles at center ± i·width.
        let g = &fs[0];
        let exact = apply(&t, g, &CalculusMethod::Eigen).unwrap();
        let dun = apply(&t, g, &CalculusMethod::dunford_for(&t, 512).unwrap()).unwrap();
        assert!(route_gap(&exact, &dun) < 1e-8);
    }
}

#[test]
fn dunford_rejects_poles_inside() {
    let t = seeded(4, 3);
    let f = ScalarFunction::LorentzianWeight { center: 0.0, width: 0.1 };
    let r = apply(&t, &f, &CalculusMethod::dunford_for(&t, 128).unwrap());
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn hille_yosida_matches_direct_solve() {
    let t = seeded(5, 9);
    let z = Complex64::new(0.4, 2.0);
    let hy = hille_yosida_resolvent(&t, z, 25.0, 20001).unwrap();
    let direct = resolvent(&t, z).unwrap().matrix;
    assert!(route_gap(&hy, &direct) < 1e-6);
}

#[test]
fn square_split_on_random_operator() {
    let t = seeded(4, 21);
    let k = SmoothingKernel::gaussian(0.01).unwrap();
    let rho = t.spectrum().unwrap().spectral_radius();
    let grid = linspace(1e-4, (rho + 0.2).powi(2), 80_001);
    let got = square_split_apply(&t, |l| Complex64::new((-l).exp(), 0.0), &k, &grid).unwrap();
    let want =
        apply(&t.squared(), &ScalarFunction::exponential(Complex64::new(-1.0, 0.0)), &CalculusMethod::Eigen).unwrap();
    assert!(route_gap(&got, &want) < 1e-3);
}

#[test]
fn taylor_converges_inside_radius() {
    let t = seeded(6, 4);
    let rho = t.spectrum().unwrap().spectral_radius();
    let f = ScalarFunction::reciprocal(Complex64::new(2.0 * rho, 0.0));
    let exact = apply(&t, &f, &CalculusMethod::Eigen).unwrap();
    let s = taylor_delta_apply(&t, &f, 60).unwrap();
    assert!(s.warning.is_none());
    assert!(route_gap(&s.matrix, &exact) < 1e-12 * max_abs(&exact).max(1.0));
}
