//! `I^p_m(t)` times `log(2+t)^{1/m}` for growing t. Each column levels off.

use kgdecay::analysis::i_p_m;

fn main() {
    let cases = [(1, 4.0), (2, 2.0), (3, 2.0), (1, 2.0)];
    println!("{:>8} {:>10} {:>10} {:>10} {:>14}", "t", "(1,4)", "(2,2)", "(3,2)", "(1,2)/loglog");
    for e in 1..=8 {
        let t = 10f64.powi(e);
        let lg = (2.0 + t).ln();
        let row: Vec<f64> = cases
            .iter()
            .map(|&(m, p)| {
                let v = i_p_m(t, m, p).unwrap() * lg.powf(1.0 / m as f64);
                if (m, p) == (1, 2.0) { v / (1.0 + lg).ln() } else { v }
            })
            .collect();
        println!("{t:>8.0e} {:>10.5} {:>10.5} {:>10.5} {:>14.5}", row[0], row[1], row[2], row[3]);
    }
}
