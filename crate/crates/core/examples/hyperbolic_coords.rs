//! Hyperbolic coordinates `t + 2B = tau cosh z`, `x = tau sinh z` and the
//! amplitude of a free wave read off along one ray.

use kgdecay::analysis::{alpha_from_fields, from_hyperbolic, to_hyperbolic};
use kgdecay::kg_solver::{run_simulation, Grid1D, SolverConfig};
use kgdecay::CubicNonlinearity;

fn main() {
    let b = 6.0;
    for (t, x) in [(0.0, 0.0), (2.0, 1.0), (100.0, 60.0), (400.0, -300.0)] {
        let pt = to_hyperbolic(t, x, b).unwrap();
        let back = from_hyperbolic(pt, b);
        println!("(t, x) = ({t}, {x}) -> tau {:.4} z {:+.4} -> ({:.3e}, {:.3e})", pt.tau, pt.z, back.0, back.1);
    }

    // without damping |alpha| settles to a constant along z = 0
    let grid = Grid1D::new(400.0, 2048).unwrap();
    let mut cfg = SolverConfig::new(0.1, b, 0.05, 380.0);
    cfg.record_times = (1..=19).map(|k| 20.0 * k as f64).collect();
    let run = run_simulation(&cfg, &CubicNonlinearity::zero(), &grid).unwrap();
    let mid = grid.n_points() / 2;
    for s in &run.snapshots {
        let tau = s.t + 2.0 * b;
        let a = alpha_from_fields(tau, 0.0, s.u[mid], s.v[mid], s.ux[mid]);
        println!("tau {tau:>6.1}  |alpha| {:.6}", a.norm());
    }
}
