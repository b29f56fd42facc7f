//! Randomized invariants on seeded Hermitian matrices.

use num_complex::Complex64;
use proptest::prelude::*;
use spectral_delta::functional_calculus::{apply, conjugate, CalculusMethod, ScalarFunction};
use spectral_delta::kernels::{
    density_curve, lorentzian_delta, lorentzian_delta_quadratic, smoothed_delta, smoothed_pairing, weak_pairing,
    SmoothingKernel,
};
use spectral_delta::measures::{
    spectral_family, spectral_measure, stone_formula, stone_weights_oracle, BorelSet, EpsilonSchedule, Interval,
};
use spectral_delta::operator::max_abs;
use spectral_delta::random::{random_hermitian, random_unitary, rng};
use spectral_delta::resolvent::resolvent;
use spectral_delta::{CMatrix, CVector, HermitianOperator};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn op(n: usize, seed: u64) -> HermitianOperator {
    random_hermitian(n, &mut rng(seed))
}

fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m.adjoint() + m) * c(0.5);
    HermitianOperator::new(h, f64::INFINITY).unwrap().spectrum().unwrap().min()
}

fn scale(t: &HermitianOperator) -> f64 {
    t.spectrum().unwrap().spectral_radius().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstruction(n in 1usize..=16, seed in any::<u64>()) {
        let t = op(n, seed);
        let back = t.spectrum().unwrap().reconstruct();
        prop_assert!(max_abs(&(back - t.matrix())) <= 1e-12 * scale(&t));
    }

    #[test]
    fn projectors_resolve_identity(n in 1usize..=16, seed in any::<u64>()) {
        let t = op(n, seed);
        let mut sum = CMatrix::zeros(n, n);
        for p in t.spectrum().unwrap().eigenprojectors() {
            prop_assert!(max_abs(&(&p.projector * &p.projector - &p.projector)) <= 1e-12);
            sum += p.projector;
        }
        prop_assert!(max_abs(&(sum - CMatrix::identity(n, n))) <= 1e-12);
    }

    #[test]
    fn smoothed_mass_is_identity(n in 1usize..=12, seed in any::<u64>(), w in 0.05f64..0.5) {
        let t = op(n, seed);
        let k = SmoothingKernel::gaussian(w).unwrap();
        let grid = k.grid_for(t.spectrum().unwrap(), 10.0);
        let mass = smoothed_pairing(&t, |_| c(1.0), &k, &grid).unwrap();
        prop_assert!(max_abs(&(mass - CMatrix::identity(n, n))) <= 1e-10);
    }

    #[test]
    fn lorentzian_is_positive(n in 1usize..=12, seed in any::<u64>(), lambda in -4.0f64..4.0, eps in 0.01f64..1.0) {
        let t = op(n, seed);
        let d = lorentzian_delta(&t, lambda, eps).unwrap();
        let peak = 1.0 / (std::f64::consts::PI * eps);
        prop_assert!(hermitian_min_eigenvalue(&d) >= -1e-10 * peak);
        prop_assert!(max_abs(&(d.adjoint() - &d)) <= 1e-10 * peak);
    }

    #[test]
    fn lorentzian_routes_agree_off_spectrum(n in 1usize..=10, seed in any::<u64>(), eps in 0.05f64..1.0) {
        let t = op(n, seed);
        let spec = t.spectrum().unwrap();
        let lambda = spec.max() + 0.5;
        let a = lorentzian_delta(&t, lambda, eps).unwrap();
        let b = lorentzian_delta_quadratic(&t, lambda, eps).unwrap();
        let oracle = smoothed_delta(&t, lambda, &SmoothingKernel::lorentzian(eps).unwrap()).unwrap();
        prop_assert!(max_abs(&(&a - &b)) <= 1e-12 / eps);
        prop_assert!(max_abs(&(&a - &oracle)) <= 1e-12 / eps);
    }

    #[test]
    fn spectral_family_is_monotone(n in 1usize..=16, seed in any::<u64>(), a in -3.0f64..3.0, d in 0.0f64..3.0) {
        let t = op(n, seed);
        let lo = spectral_family(&t, a).unwrap();
        let hi = spectral_family(&t, a + d).unwrap();
        prop_assert!(hermitian_min_eigenvalue(&(&hi - &lo)) >= -1e-12);
        prop_assert!(max_abs(&(&lo * &lo - &lo)) <= 1e-12);
        prop_assert!(max_abs(&(&hi * &lo - &lo)) <= 1e-12);
    }

    #[test]
    fn measure_is_additive(n in 1usize..=12, seed in any::<u64>(), cut in -1.0f64..1.0) {
        let t = op(n, seed);
        let spec = t.spectrum().unwrap();
        prop_assume!(spec.distance_to_spectrum(c(cut)) > 1e-6);
        let whole = BorelSet::interval(Interval::open(-100.0, 100.0)).unwrap();
        let left = BorelSet::interval(Interval::open(-100.0, cut)).unwrap();
        let right = BorelSet::interval(Interval::open(cut, 100.0)).unwrap();
        let sum = spectral_measure(&t, &left).unwrap() + spectral_measure(&t, &right).unwrap();
        prop_assert!(max_abs(&(spectral_measure(&t, &whole).unwrap() - CMatrix::identity(n, n))) <= 1e-12);
        prop_assert!(max_abs(&(sum - CMatrix::identity(n, n))) <= 1e-12);
    }

    #[test]
    fn conjugation_commutes_with_calculus(n in 1usize..=10, seed in any::<u64>(), lambda in -2.0f64..2.0) {
        let t = op(n, seed);
        let mut r = rng(seed ^ 0x5eed);
        let u = random_unitary(n, &mut r);
        let ct = conjugate(&t, &u).unwrap();
        let f = ScalarFunction::gaussian(lambda, 0.7);
        let lhs = apply(&ct, &f, &CalculusMethod::Eigen).unwrap();
        let rhs = u.adjoint() * apply(&t, &f, &CalculusMethod::Eigen).unwrap() * &u;
        prop_assert!(max_abs(&(lhs - rhs)) <= 1e-11);
    }

    #[test]
    fn first_resolvent_identity(n in 1usize..=16, seed in any::<u64>(), zr in -3.0f64..3.0, wr in -3.0f64..3.0, zi in 0.2f64..2.0, wi in 0.2f64..2.0) {
        let t = op(n, seed);
        let z = Complex64::new(zr, zi);
        let w = Complex64::new(wr, -wi);
        let rz = resolvent(&t, z).unwrap().matrix;
        let rw = resolvent(&t, w).unwrap().matrix;
        let bound = 1.0 / (zi * wi);
        prop_assert!(max_abs(&(&rz - &rw - &rz * &rw * (w - z))) <= 1e-12 * bound * scale(&t) * n as f64);
    }

    #[test]
    fn resolvent_adjoint_is_conjugate_point(n in 1usize..=12, seed in any::<u64>(), zr in -3.0f64..3.0, zi in 0.1f64..2.0) {
        let t = op(n, seed);
        let z = Complex64::new(zr, zi);
        let a = resolvent(&t, z).unwrap().matrix.adjoint();
        let b = resolvent(&t, z.conj()).unwrap().matrix;
        prop_assert!(max_abs(&(a - b)) <= 1e-12 / zi);
    }

    #[test]
    fn density_curve_integrates_to_inner_product(n in 1usize..=10, seed in any::<u64>(), w in 0.05f64..0.3) {
        let t = op(n, seed);
        let mut r = rng(seed.wrapping_add(1));
        let u = random_unitary(n.max(2), &mut r);
        let x = CVector::from_fn(n, |i, _| u[(i, 0)]);
        let y = CVector::from_fn(n, |i, _| u[(i, 1 % u.ncols())]);
        let k = SmoothingKernel::gaussian(w).unwrap();
        let grid = k.grid_for(t.spectrum().unwrap(), 10.0);
        let curve = density_curve(&t, &x, &y, &grid, &k).unwrap();
        let total = weak_pairing(&curve, |_| c(1.0)).unwrap();
        prop_assert!((total - y.dotc(&x)).norm() <= 1e-10);
    }

    #[test]
    fn stone_matches_arctan_weights(n in 1usize..=6, seed in any::<u64>(), a in -2.0f64..0.0, len in 0.5f64..3.0) {
        let t = op(n, seed);
        let b = a + len;
        let schedule = EpsilonSchedule::new(vec![0.1, 0.05], false).unwrap();
        let s = stone_formula(&t, a, b, &schedule, 400).unwrap();
        for (eps, m) in &s.per_epsilon {
            let oracle = stone_weights_oracle(&t, a, b, *eps).unwrap();
            // Trapezoid endpoint term h²|f'|/12 with h ≤ ε/10 and
            // |f'| ≤ (3√3/8)/(πε²), at two endpoints.
            let bound = 2.0 * (3.0 * 3f64.sqrt() / 8.0) / std::f64::consts::PI / 1200.0;
            prop_assert!(max_abs(&(m - oracle)) <= bound);
        }
    }
}
