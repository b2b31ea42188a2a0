//! Integrates the amplitude equation and checks the modulus law
//! `1/|beta|^2 = 1/|beta0|^2 + 2 Re kappa log(tau/tau0)`.

use kgdecay::profile_ode::{exact_profile, integrate_profile, ProfileParams};
use kgdecay::{ComplexValue, Preset};

fn main() {
    let kappa = Preset::Ut3.nonlinearity().k_closed(0.0).unwrap();
    let params = ProfileParams::new(kappa, ComplexValue::new(0.5, 0.0), 3.0).unwrap();
    let traj = integrate_profile(&params, None, 1e12, 1000).unwrap();
    println!("kappa = {kappa}");
    println!("{:>10} {:>12} {:>12} {:>12}", "tau", "|beta|", "exact", "|b|^2 log");
    for (tau, b) in traj.taus.iter().zip(&traj.betas).step_by(1000) {
        let exact = exact_profile(&params, *tau).unwrap();
        // tends to 1/(2 Re kappa) = 4/3
        println!("{tau:>10.3e} {:>12.6} {:>12.6} {:>12.6}", b.norm(), exact.norm(), b.norm_sqr() * tau.ln());
    }
}
