//! Closed-form K_F against Gauss-Legendre quadrature along a few rays.

use kgdecay::CubicNonlinearity;

fn main() {
    // u^3 + u^2 ut - ut^3 - ut^2 ux / 2; the u^3 term only shifts the phase
    let f = CubicNonlinearity::zero().with(1, 1.0).with(5, 1.0).with(6, -1.0).with(9, -0.5);
    println!("{:>6} {:>14} {:>14} {:>10}", "z", "Re K_F", "Im K_F", "gap");
    for k in -8..=8 {
        let z = 0.5 * k as f64;
        let a = f.k_closed(z).unwrap();
        let b = f.k_quadrature(z, 64).unwrap();
        println!("{z:>6.2} {:>14.6e} {:>14.6e} {:>10.1e}", a.re, a.im, (a - b).norm());
    }
    let p = f.p_f();
    println!("P_F(y) = {:?}", p.coeffs());
}
