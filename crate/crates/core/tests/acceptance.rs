//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints its own PASS/FAIL line; the process fails if any criterion does.

use kgdecay::analysis::{fit_decay, fit_decay_loglog, fit_modulation, i_p_m, lp_norm};
use kgdecay::classifier::{classify, predicted_decay, ratio_inf, ClassTag, NormTarget, DEFAULT_TOL};
use kgdecay::cli::pipeline::{assess_all, DecayAssessment};
use kgdecay::cli::{alpha_samples, ExperimentConfig, NonlinearitySpec, TauSamples};
use kgdecay::kg_solver::{
    bump_data, run_simulation, DataShape, FieldState, Grid1D, Propagator, SolverConfig,
};
use kgdecay::profile_ode::{
    asymptotics_deviation, exact_profile, integrate_profile, l_func, l_func_quadrature, ProfileParams,
};
use kgdecay::{ComplexValue, CubicNonlinearity, Preset};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::time::Instant;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

// ---------------------------------------------------------------- 1

/// Brute-force `inf P / (1 - y^2)^j` on Chebyshev nodes `y = cos theta`,
/// which cluster at the endpoints where the infimum often sits. P is expanded
/// about the nearer endpoint, and `1 -+ y` come from half-angle formulas, so
/// a root of order `j` at an endpoint cancels without roundoff.
fn grid_ratio_inf(p: &kgdecay::classifier::CubicPoly, j: i32, n: usize) -> f64 {
    let coef = p.coeffs();
    let binom = |i: usize, k: usize| [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]][i][k];
    // Taylor coefficients about y = e
    let shifted = |e: f64| -> [f64; 4] {
        std::array::from_fn(|k| (k..4).map(|i| coef[i] * binom(i, k) * e.powi((i - k) as i32)).sum())
    };
    let (at_plus, at_minus) = (shifted(1.0), shifted(-1.0));
    let horner = |a: &[f64; 4], h: f64| a.iter().rev().fold(0.0, |acc, c| acc * h + c);
    (1..n)
        .map(|k| {
            let theta = PI * k as f64 / n as f64;
            let (dp, dm) = (2.0 * (0.5 * theta).sin().powi(2), 2.0 * (0.5 * theta).cos().powi(2));
            let value = if dp < dm { horner(&at_plus, -dp) } else { horner(&at_minus, dm) };
            value / (dp * dm).powi(j)
        })
        .fold(f64::INFINITY, f64::min)
}

fn classifier_fixtures() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let want = [
        (Preset::U2Ut, ClassTag::B1),
        (Preset::U2UtUx, ClassTag::B2),
        (Preset::UtPUx3, ClassTag::B3),
        (Preset::Ux2Ut, ClassTag::C),
        (Preset::Ut3, ClassTag::B0),
        (Preset::U3, ClassTag::A0),
    ];
    for (preset, tag) in want {
        let got = classify(&preset.nonlinearity().p_f(), DEFAULT_TOL).unwrap();
        o.check(got.tag == tag, format!("{} -> {} (want {tag})", preset.name(), got.tag));
        if tag == ClassTag::C {
            let z0 = got.z0.unwrap_or(f64::NAN);
            o.check(z0.abs() < 1e-12, format!("{} z0 = {}", preset.name(), z0 + 0.0));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    for (preset, j, exact) in [(Preset::U2Ut, 1, 1.0 / 8.0), (Preset::U2UtUx, 2, 1.0 / 16.0), (Preset::UtPUx3, 3, 3.0 / 64.0)]
    {
        let p = preset.nonlinearity().p_f();
        let cls = classify(&p, DEFAULT_TOL).unwrap();
        let cj = cls.constant(j as usize).unwrap();
        let oracle = grid_ratio_inf(&p, j, 2_000_000) / 8.0;
        o.check(
            (cj - exact).abs() <= 1e-12 && (cj - oracle).abs() <= 1e-6,
            format!("{} C_{j} = {cj} (exact {exact}, grid {oracle:.9})", preset.name()),
        );
        let via_ratio = ratio_inf(&p, j as u8).unwrap() / 8.0;
        o.check((via_ratio - cj).abs() <= 1e-12, format!("{} ratio_inf/8 = {via_ratio}", preset.name()));
    }
    o.check(elapsed < 1.0, format!("classification took {elapsed:.3} s (< 1 s)"));
    o
}

// ---------------------------------------------------------------- 2

fn kf_oracle() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = StdRng::seed_from_u64(0x4b46);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g: [f64; 10] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let f = CubicNonlinearity::new(g).unwrap();
        let scale: f64 = g.iter().map(|x| x.abs()).sum();
        for _ in 0..10 {
            let z = rng.gen_range(-5.0..5.0);
            let a = f.k_closed(z).unwrap();
            let b = f.k_quadrature(z, 64).unwrap();
            // relative to the size K_F would have with all terms aligned
            let rel = (a - b).norm() / (scale * z.cosh().powi(3));
            worst = worst.max(rel);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.check(worst <= 1e-10, format!("max relative gap {worst:.2e} over 100 vectors x 10 rays (<= 1e-10)"));
    o.check(elapsed < 1.0, format!("took {elapsed:.3} s (< 1 s)"));
    o
}

// ---------------------------------------------------------------- 3

fn l_function() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = StdRng::seed_from_u64(0x4c);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 200 {
        let s = 10f64.powf(rng.gen_range(-2.0..8.0));
        let phi = rng.gen_range(-2.0..2.0);
        if !(1.0 + 2.0 * phi * s.ln() > 1e-3) || s == 1.0 {
            continue;
        }
        let a = l_func(s, phi).unwrap();
        let b = l_func_quadrature(s, phi, 16).unwrap();
        worst = worst.max((a - b).abs() / a.abs());
        n += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.check(worst <= 1e-10, format!("max relative gap {worst:.2e} over 200 admissible (s, phi) (<= 1e-10)"));
    o.check(elapsed < 1.0, format!("took {elapsed:.3} s (< 1 s)"));
    o
}

// ---------------------------------------------------------------- 4

fn profile_ode() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for kappa in [c(0.125, 0.0), c(0.375, 0.0), c(1.0, 0.0), c(1.0, 2.0)] {
        for b0 in [0.3, 1.0] {
            let p = ProfileParams::new(kappa, c(b0, 0.0), 3.0).unwrap();
            let num = integrate_profile(&p, None, 1e4, 1000).unwrap().last().unwrap().1;
            let exact = exact_profile(&p, 1e4).unwrap();
            let rel = (num - exact).norm() / exact.norm();
            o.check(rel <= 1e-8, format!("kappa = {kappa}, beta0 = {b0}: relative error {rel:.2e} (<= 1e-8)"));
        }
    }
    let p = ProfileParams::new(c(1.0, 0.0), c(0.3, 0.0), 3.0).unwrap();
    let rho = |t: f64| c(0.1 * t.powf(-1.5), 0.0);
    // beta_inf comes from the tail fit; integrating far past 1e6 keeps that
    // fit from pinning the deviation to zero inside the inspected range
    let rep = asymptotics_deviation(&p, Some(&rho), (1e2, 1e12), 1000).unwrap();
    let first = rep.mean_over(1e2, 1e3).unwrap();
    let last = rep.mean_over(1e5, 1e6).unwrap();
    o.check(
        last <= 1.2 * first,
        format!("forced deviation: first-decade mean {first:.3e}, final-decade mean {last:.3e} (ratio {:.3} <= 1.2)", last / first),
    );
    let elapsed = start.elapsed().as_secs_f64();
    o.check(elapsed < 10.0, format!("took {elapsed:.2} s (< 10 s)"));
    o
}

// ---------------------------------------------------------------- 5

fn solver_physics() -> Outcome {
    let mut o = Outcome::new();
    let (eps, b, t_final) = (0.1, 6.0, 400.0);
    let grid = Grid1D::new(1100.0, 8192).unwrap();
    let prop = Propagator::new(grid);
    let mut cfg = SolverConfig::new(eps, b, 0.02, t_final);
    cfg.record_times = vec![0.0, 100.0, 200.0, 300.0, 400.0];
    cfg.norm_ps = vec![f64::INFINITY];
    let run = run_simulation(&cfg, &CubicNonlinearity::zero(), &grid).unwrap();

    let energy = |s: &kgdecay::kg_solver::Snapshot| {
        prop.linear_energy(&FieldState { t: s.t, u: s.u.clone(), v: s.v.clone() })
    };
    let e0 = energy(&run.snapshots[0]);
    let drift = run.snapshots.iter().map(|s| (energy(s) / e0 - 1.0).abs()).fold(0.0, f64::max);
    o.check(drift <= 1e-10, format!("linear energy drift {drift:.2e} (<= 1e-10)"));

    let mut leak = 0.0f64;
    for s in &run.snapshots[1..] {
        let edge = s.t + b + 5.0 * grid.dx();
        for (x, u) in grid.nodes().iter().zip(&s.u) {
            if x.abs() > edge {
                leak = leak.max(u.abs());
            }
        }
    }
    o.check(leak <= 1e-8 * eps, format!("leak beyond t + B + 5 dx: {:.2e} eps (<= 1e-8 eps)", leak / eps));

    let times = &run.norms.times;
    let sup = &run.norms.u[0];
    let at = |t: f64| {
        let i = times.iter().position(|&s| (s - t).abs() < 1e-9).unwrap();
        sup[i] * t.sqrt()
    };
    let reference = at(200.0);
    let spread = times
        .iter()
        .zip(sup)
        .filter(|(t, _)| (50.0..=400.0).contains(*t))
        .map(|(t, n)| (n * t.sqrt() / reference - 1.0).abs())
        .fold(0.0, f64::max);
    o.check(spread <= 0.2, format!("|u|_inf sqrt(t) within {:.1}% of its t = 200 value on [50, 400] (<= 20%)", 100.0 * spread));

    // splitting error needs a nonlinearity; short damped run on the same grid
    let ut3 = Preset::Ut3.nonlinearity();
    let final_u = |dt: f64| {
        let mut c = SolverConfig::new(eps, b, dt, 10.0);
        c.record_times = vec![10.0];
        run_simulation(&c, &ut3, &grid).unwrap().snapshots.pop().unwrap().u
    };
    let reference = final_u(0.1 / 8.0);
    let err = |dt: f64| {
        let d: Vec<f64> = final_u(dt).iter().zip(&reference).map(|(a, b)| a - b).collect();
        lp_norm(&d, grid.dx(), 2.0)
    };
    let factor = err(0.1) / err(0.05);
    o.check((factor / 4.0 - 1.0).abs() <= 0.2, format!("Strang convergence factor {factor:.3} (4 +- 20%)"));

    // the same leak bound is met once the grid resolves the bump's spectral tail
    let fine = Grid1D::new(1100.0, 32768).unwrap();
    let s = Propagator::new(fine).linear_step(&bump_data(&fine, b, eps, DataShape::Bump), t_final);
    let edge = t_final + b + 5.0 * fine.dx();
    let fine_leak =
        fine.nodes().iter().zip(&s.u).filter(|(x, _)| x.abs() > edge).map(|(_, u)| u.abs()).fold(0.0, f64::max);
    o.lines.push(format!("info leak at N = 32768: {:.2e} eps", fine_leak / eps));
    o
}

// ---------------------------------------------------------------- 6

fn modulation() -> Outcome {
    let mut o = Outcome::new();
    let mut config = ExperimentConfig::default();
    config.nonlinearity = NonlinearitySpec::Preset("ut3".into());
    config.eps = 0.1;
    // the tau^{1/2} normalization is exact only up to O(B/tau); a wide bump
    // carries a large amplitude and keeps that bias small against the damping
    config.b = 20.0;
    config.analysis.z_samples = vec![0.0];
    config.analysis.tau_samples = TauSamples { lo: 90.0, hi: 900.0, count: 40 };
    let grid = config.grid().unwrap();
    let run = run_simulation(&config.solver_config(config.eps), &Preset::Ut3.nonlinearity(), &grid).unwrap();
    let taus = config.analysis.tau_samples.values();
    let samples = alpha_samples(&config, &run, &taus).unwrap();
    let fit = fit_modulation(&samples).unwrap();
    let predicted = Preset::Ut3.nonlinearity().k_closed(0.0).unwrap().re;
    let rel = (fit.kappa_re / predicted - 1.0).abs();
    o.check(
        rel <= 0.25,
        format!(
            "Re kappa_eff = {:.4} vs Re K_F(0) = {predicted} over tau in [90, 900], {} samples, R^2 = {:.4}: off by {:.1}% (<= 25%)",
            fit.kappa_re,
            fit.n_samples,
            fit.r_squared,
            100.0 * rel
        ),
    );
    o
}

// ---------------------------------------------------------------- 7

fn decay_trends() -> Outcome {
    let mut o = Outcome::new();
    let results: Vec<(Preset, Vec<DecayAssessment>)> = Preset::ALL
        .par_iter()
        .map(|&preset| {
            let mut config = ExperimentConfig::default();
            config.nonlinearity = NonlinearitySpec::Preset(preset.name().into());
            config.eps = 0.1;
            // a narrow bump enters the asymptotic regime early enough for the
            // logarithmic gain to dominate the free transient inside [100, 1000]
            config.b = 3.0;
            config.shape = DataShape::BumpPair;
            config.analysis.z_samples.clear();
            let grid = config.grid().unwrap();
            let nl = preset.nonlinearity();
            let run = run_simulation(&config.solver_config(config.eps), &nl, &grid).unwrap();
            let law = predicted_decay(&classify(&nl.p_f(), DEFAULT_TOL).unwrap()).unwrap();
            (preset, assess_all(&run.norms, &law, [100.0, 1000.0], config.analysis.smoothing_width))
        })
        .collect();
    for (preset, list) in results {
        for a in list {
            let p = if a.p.is_infinite() { "inf".to_string() } else { a.p.to_string() };
            let mono = if a.enhanced {
                format!("rise {:+.3}%{}", 100.0 * a.monotone.max_rise, if a.monotone.holds { "" } else { " NOT MONOTONE" })
            } else {
                "not enhanced".into()
            };
            let why = if a.verdict.diagnosis.is_empty() { String::new() } else { format!(" [{}]", a.verdict.diagnosis) };
            let documented = !matches!(a.verdict.kind, kgdecay::analysis::VerdictKind::Inconclusive)
                || !a.verdict.diagnosis.is_empty();
            o.check(
                a.passes() && documented,
                format!(
                    "{:<7} {:<2} p = {:<3} q_pred {:.3} q_fit {:>6.3} {:?}; {mono}{why}",
                    preset.name(),
                    a.target.name(),
                    p,
                    a.verdict.q_predicted,
                    a.verdict.q_fit,
                    a.verdict.kind
                ),
            );
        }
    }
    o
}

// ---------------------------------------------------------------- 8

fn synthetic_fits() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let ts: Vec<f64> = (0..400).map(|k| 100.0 * 100f64.powf(k as f64 / 399.0)).collect();
    let mut worst = 0.0f64;
    for p in [2.0, 4.0, f64::INFINITY] {
        let a = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
        for q in [0.0, 1.0 / 8.0, 1.0 / 6.0, 0.25, 1.0 / 3.0, 0.5, 1.0] {
            for r in [0.0, 0.5, 1.0] {
                let ns: Vec<f64> = ts
                    .iter()
                    .map(|&t| {
                        let l = (2.0 + t).ln();
                        (1.0 + t).powf(-a) * l.powf(-q) * (1.0 + l).ln().powf(r)
                    })
                    .collect();
                if r == 0.0 {
                    let f = fit_decay(&ts, &ns, p, NormTarget::U).unwrap();
                    worst = worst.max((f.q_fit - q).abs());
                }
                let f = fit_decay_loglog(&ts, &ns, p, NormTarget::U).unwrap();
                worst = worst.max((f.q_fit - q).abs()).max((f.r_fit.unwrap() - r).abs());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.check(worst <= 0.05, format!("max exponent error {worst:.2e} over t in [100, 1e4] (<= 0.05)"));
    o.check(elapsed < 1.0, format!("took {elapsed:.3} s (< 1 s)"));
    o
}

// ---------------------------------------------------------------- 9

fn i_pm_bounds() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let ts: Vec<f64> = (0..=70).map(|k| 10f64.powf(1.0 + k as f64 / 10.0)).collect();
    // with s = eta lg^{1/m} the scaled integral is int_0^{2 lg^{1/m}} (1 + s^m)^{-p/2} ds,
    // which increases to the full integral below
    let ceilings = [(1, 4.0, 1.0), (2, 2.0, PI / 2.0), (3, 2.0, 2.0 * PI / (3.0 * 3f64.sqrt()))];
    for (m, p, ceiling) in ceilings {
        let scaled: Vec<f64> =
            ts.iter().map(|&t| i_p_m(t, m, p).unwrap() * (2.0 + t).ln().powf(1.0 / m as f64)).collect();
        let max = scaled.iter().copied().fold(0.0, f64::max);
        let last = *scaled.last().unwrap();
        o.check(
            max <= ceiling * (1.0 + 1e-9) && last >= 0.5 * ceiling,
            format!("(m, p) = ({m}, {p}): sup I lg^(1/m) = {max:.5} <= {ceiling:.5}, value at 1e8 {last:.5}"),
        );
    }
    // here I lg = log(1 + 2 lg), so the ratio to log(1 + lg) stays below 2
    let ratio_max = ts
        .iter()
        .map(|&t| {
            let lg = (2.0 + t).ln();
            i_p_m(t, 1, 2.0).unwrap() * lg / (1.0 + lg).ln()
        })
        .fold(0.0, f64::max);
    o.check(ratio_max <= 2.0, format!("(m, p) = (1, 2): sup I lg / log(1 + lg) = {ratio_max:.5} <= 2"));
    let elapsed = start.elapsed().as_secs_f64();
    o.check(elapsed < 1.0, format!("took {elapsed:.3} s (< 1 s)"));
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("classifier fixtures", classifier_fixtures),
        ("K_F closed form vs quadrature", kf_oracle),
        ("L function closed form vs quadrature", l_function),
        ("profile ODE accuracy and remainder", profile_ode),
        ("free solver physics", solver_physics),
        ("modulation rate at z = 0", modulation),
        ("decay trends for every preset", decay_trends),
        ("synthetic fit identifiability", synthetic_fits),
        ("I^p_m bounds", i_pm_bounds),
    ];
    let mut summary = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        for l in &out.lines {
            println!("    {l}");
        }
        let line = format!("criterion {} {}: {name} ({secs:.1} s)", k + 1, if out.pass { "PASS" } else { "FAIL" });
        println!("{line}");
        summary.push((out.pass, line));
    }
    println!();
    for (_, l) in &summary {
        println!("{l}");
    }
    let failed = summary.iter().filter(|(ok, _)| !ok).count();
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
