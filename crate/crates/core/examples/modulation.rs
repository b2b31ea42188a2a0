//! Measures the damping rate of the amplitude at z = 0 for F = -ut^3 and
//! compares it with Re K_F(0) = 3/8. Takes about half a minute in release mode.

use kgdecay::analysis::{extract_alpha, fit_modulation};
use kgdecay::kg_solver::{run_simulation, Grid1D, SolverConfig};
use kgdecay::Preset;

fn main() {
    let b = 20.0;
    // below tau ~ 100 the tau^{1/2} normalization is off by O(B/tau)
    let taus: Vec<f64> = (0..40).map(|k| 90.0 * 10f64.powf(k as f64 / 39.0)).collect();
    let grid = Grid1D::new(900.0, 8192).unwrap();
    let mut cfg = SolverConfig::new(0.1, b, 0.02, 900.0 - 2.0 * b);
    cfg.record_times = taus.iter().map(|tau| tau - 2.0 * b).collect();
    cfg.norm_interval = 10.0;
    let nl = Preset::Ut3.nonlinearity();
    let run = run_simulation(&cfg, &nl, &grid).unwrap();

    let samples = extract_alpha(&run, &[0.0], &taus, b).unwrap();
    for s in samples.iter().step_by(6) {
        println!("tau {:>7.1}  |alpha| {:.6}  1/|alpha|^2 {:.3}", s.tau, s.alpha.norm(), 1.0 / s.alpha.norm_sqr());
    }
    let fit = fit_modulation(&samples).unwrap();
    let want = nl.k_closed(0.0).unwrap().re;
    println!("Re kappa_eff = {:.4} (R^2 {:.4}), Re K_F(0) = {want}", fit.kappa_re, fit.r_squared);
}
