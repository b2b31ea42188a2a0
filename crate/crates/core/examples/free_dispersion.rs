//! Free Klein-Gordon evolution: the sup norm decays like t^{-1/2} and the
//! energy is conserved by the exact rotation.

use kgdecay::kg_solver::{run_simulation, FieldState, Grid1D, Propagator, SolverConfig};
use kgdecay::CubicNonlinearity;

fn main() {
    let grid = Grid1D::new(600.0, 4096).unwrap();
    let mut cfg = SolverConfig::new(0.1, 6.0, 0.05, 500.0);
    cfg.norm_interval = 50.0;
    cfg.norm_ps = vec![2.0, f64::INFINITY];
    cfg.record_times = vec![0.0, 500.0];
    let run = run_simulation(&cfg, &CubicNonlinearity::zero(), &grid).unwrap();

    println!("{:>6} {:>12} {:>14}", "t", "|u|_2", "|u|_inf sqrt t");
    for (i, t) in run.norms.times.iter().enumerate() {
        println!("{t:>6} {:>12.6} {:>14.6}", run.norms.u[0][i], run.norms.u[1][i] * t.sqrt());
    }
    let prop = Propagator::new(grid);
    let e: Vec<f64> = run
        .snapshots
        .iter()
        .map(|s| prop.linear_energy(&FieldState { t: s.t, u: s.u.clone(), v: s.v.clone() }))
        .collect();
    println!("relative energy drift {:.2e}", (e[1] / e[0] - 1.0).abs());
}
