//! Simulates one preset and runs the decay assessment on every recorded norm.
//!
//!     cargo run --release --example decay_trends -- ux2ut

use kgdecay::classifier::{classify, predicted_decay, DEFAULT_TOL};
use kgdecay::cli::pipeline::assess_all;
use kgdecay::kg_solver::{run_simulation, DataShape, Grid1D, SolverConfig};
use kgdecay::CubicNonlinearity;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "u2ut".into());
    let nl = CubicNonlinearity::preset(&name).unwrap_or_else(|e| panic!("{e}"));
    let law = predicted_decay(&classify(&nl.p_f(), DEFAULT_TOL).unwrap()).unwrap();

    let grid = Grid1D::new(560.0, 4096).unwrap();
    let mut cfg = SolverConfig::new(0.1, 3.0, 0.02, 500.0);
    cfg.shape = DataShape::BumpPair;
    cfg.norm_interval = 0.25;
    let run = run_simulation(&cfg, &nl, &grid).unwrap();

    println!("{name}: class {}", law.class);
    for a in assess_all(&run.norms, &law, [50.0, 500.0], 2.0 * std::f64::consts::PI) {
        println!(
            "{:<2} p = {:<3} enhanced {:<5} max rise {:+.3}%  {:?}: {}",
            a.target.name(),
            a.p,
            a.enhanced,
            100.0 * a.monotone.max_rise,
            a.verdict.kind,
            a.verdict.diagnosis
        );
    }
}
