//! Closed-form spectral families of momentum and Laplacian on a periodic
//! grid against the discretized spectral projectors.

use spectral_delta::measures::spectral_family_action;
use spectral_delta::models::{
    build_laplacian, build_momentum, laplacian_family_closed_form, momentum_family_closed_form, Grid1D, GridFunction,
};

fn rel(a: &spectral_delta::CVector, b: &spectral_delta::CVector) -> f64 {
    (a - b).norm() / b.norm()
}

fn main() -> spectral_delta::Result<()> {
    for n in [256, 512] {
        let grid = Grid1D::periodic(n, 20.0)?;
        let phi = GridFunction::gaussian_packet(grid, 0.0, 1.5, 0.0);
        let p = build_momentum(&grid)?;
        let l = build_laplacian(&grid)?;
        // At small lambda the cutoff sits where the packet's spectrum is
        // large and the finite-window tail of the 1/(s-x) kernel dominates,
        // so the error stops improving with n.
        for lambda in [0.5, 1.0, 2.0] {
            let closed = momentum_family_closed_form(&phi, lambda)?;
            let proj = spectral_family_action(&p, lambda, phi.values())?;
            println!("n={n} momentum  lambda={lambda}: rel L2 {:.3e}", rel(closed.values(), &proj));
        }
        for lambda in [-1.0, 1.0, 4.0] {
            let closed = laplacian_family_closed_form(&phi, lambda)?;
            let proj = spectral_family_action(&l, lambda, phi.values())?;
            let err = if proj.norm() > 0.0 { rel(closed.values(), &proj) } else { closed.l2_norm() };
            println!("n={n} laplacian lambda={lambda}: rel L2 {err:.3e}");
        }
    }
    Ok(())
}
