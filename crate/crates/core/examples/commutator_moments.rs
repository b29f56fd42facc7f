//! Moment identities: `∫λ δ(λI - T) dλ = T` and the double-moment
//! representation of `[S, T]` on the Pauli matrices.

use num_complex::Complex64;
use spectral_delta::commutator::{
    commutator, double_moment_commutator, factorized_moment_commutator, pauli, single_moment_check, OperatorPair,
};
use spectral_delta::kernels::SmoothingKernel;
use spectral_delta::operator::max_abs;

fn main() -> spectral_delta::Result<()> {
    let [sx, sy, sz] = pauli();
    let k = SmoothingKernel::gaussian(0.1)?;
    let grid = k.grid_for(sx.spectrum()?, 10.0);
    println!("single moment of sx: gap {:.1e}", max_abs(&(single_moment_check(&sx, &k, &grid)? - sx.matrix())));

    let exact = commutator(&sx, &sy)?;
    println!("[sx, sy] - 2i sz: {:.1e}", max_abs(&(&exact - sz.matrix() * Complex64::new(0.0, 2.0))));
    let pair = OperatorPair::new(sx, sy)?;
    let double = double_moment_commutator(&pair, &k, &grid, &grid)?;
    let fact = factorized_moment_commutator(&pair, &k, &grid, &grid)?;
    println!("double moment vs exact: {:.1e}", max_abs(&(&double - &exact)));
    println!("double vs factorized:   {:.1e}", max_abs(&(&double - &fact)));
    let swapped = double_moment_commutator(&pair.swapped(), &k, &grid, &grid)?;
    println!("antisymmetry:           {:.1e}", max_abs(&(&double + &swapped)));
    Ok(())
}
