//! Classifies every preset nonlinearity and prints the decay law it predicts.

use kgdecay::classifier::{classify, predicted_decay, NormTarget, DEFAULT_TOL};
use kgdecay::Preset;

fn main() {
    for preset in Preset::ALL {
        let p = preset.nonlinearity().p_f();
        let cls = classify(&p, DEFAULT_TOL).expect("presets are never ambiguous");
        let consts: Vec<String> = (0..4)
            .filter_map(|j| cls.constant(j).map(|c| format!("C_{j} = {c:.5}")))
            .collect();
        println!("{:<7} class {:<3} {}", preset.name(), cls.tag.to_string(), consts.join("  "));
        let Ok(law) = predicted_decay(&cls) else { continue };
        for target in NormTarget::ALL {
            for p in [2.0, 4.0, f64::INFINITY] {
                let e = law.exponents(target, p).unwrap();
                if e.q > 0.0 {
                    println!("        {:<2} L^{p:<3}  (1+t)^-{:.3} log^-{:.3} loglog^{:.1}", target.name(), e.a, e.q, e.r);
                }
            }
        }
    }
}
