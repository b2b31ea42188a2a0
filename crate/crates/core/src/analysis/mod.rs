//! Hyperbolic coordinates, L^p norms, amplitude extraction from simulation
//! snapshots, and the fits that compare measured decay against predictions.

mod fit;

pub use fit::{
    compare_with_theorem, fit_decay, fit_decay_loglog, i_p_m, moving_average, non_increasing, DecayFit,
    Monotonicity, Verdict, VerdictKind, FIT_MIN_T, PRE_ASYMPTOTIC_RATIO, Q_MARGIN, RESIDUAL_THRESHOLD,
};

use crate::kg_solver::{RunRecord, Snapshot};
use crate::nonlinearity::ComplexValue;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

/// Serializes floats that may be non-finite: `"inf"`, `"-inf"` and `"nan"`
/// stand in for the values plain JSON numbers cannot hold.
pub mod serde_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(de::Error::custom(format!("expected a number, \"inf\", \"-inf\" or \"nan\", got {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("point (t = {t}, x = {x}) is outside the cone |x| < t + 2B")]
    OutsideCone { t: f64, x: f64 },
    #[error("tau must be positive, got {0}")]
    BadTau(f64),
    #[error("no snapshots bracket t = {0}")]
    MissingSnapshot(f64),
    #[error("x = {0} is too close to the grid edge for cubic interpolation")]
    OffGrid(f64),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("window [{lo}, {hi}] is too short: {why}")]
    InsufficientWindow { lo: f64, hi: f64, why: String },
    #[error("degenerate regression: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoint {
    pub tau: f64,
    pub z: f64,
}

/// `tau = sqrt((t+2B)^2 - x^2)`, `z = atanh(x/(t+2B))`.
pub fn to_hyperbolic(t: f64, x: f64, b: f64) -> Result<HyperbolicPoint, AnalysisError> {
    let s = t + 2.0 * b;
    if !(s > 0.0 && x.abs() < s) {
        return Err(AnalysisError::OutsideCone { t, x });
    }
    let y = x / s;
    let tau = s * ((1.0 - y) * (1.0 + y)).sqrt();
    if !(tau > 0.0) {
        return Err(AnalysisError::OutsideCone { t, x });
    }
    Ok(HyperbolicPoint { tau, z: y.atanh() })
}

pub fn from_hyperbolic(pt: HyperbolicPoint, b: f64) -> (f64, f64) {
    (pt.tau * pt.z.cosh() - 2.0 * b, pt.tau * pt.z.sinh())
}

/// Riemann-sum L^p norm on a uniform grid; `p = inf` gives the max.
pub fn lp_norm(values: &[f64], dx: f64, p: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || m == 0.0 || !m.is_finite() {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * (s * dx).powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSample {
    pub tau: f64,
    pub z: f64,
    pub alpha: ComplexValue,
}

/// `alpha = e^{-i tau} (v - i d_tau v)` from the pointwise values of `u`,
/// `u_t`, `u_x` at `(tau, z)`, where `v = tau^{1/2} u`.
pub fn alpha_from_fields(tau: f64, z: f64, u: f64, ut: f64, ux: f64) -> ComplexValue {
    let sq = tau.sqrt();
    let v = sq * u;
    let dv = sq * (z.cosh() * ut + z.sinh() * ux) + u / (2.0 * sq);
    ComplexValue::from_polar(1.0, -tau) * ComplexValue::new(v, -dv)
}

/// Four-point Lagrange interpolation of node values at `x`.
fn cubic_at(values: &[f64], x0: f64, dx: f64, x: f64) -> Result<f64, AnalysisError> {
    let s = (x - x0) / dx;
    let k = s.floor() as isize;
    if k < 1 || (k + 2) as usize >= values.len() {
        return Err(AnalysisError::OffGrid(x));
    }
    let f = s - k as f64;
    let k = k as usize;
    let (a, b, c, d) = (values[k - 1], values[k], values[k + 1], values[k + 2]);
    Ok(-f * (f - 1.0) * (f - 2.0) / 6.0 * a
        + (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0 * b
        - (f + 1.0) * f * (f - 2.0) / 2.0 * c
        + (f + 1.0) * f * (f - 1.0) / 6.0 * d)
}

fn bracket(snaps: &[Snapshot], t: f64) -> Result<(&Snapshot, &Snapshot, f64), AnalysisError> {
    if let Some(s) = snaps.iter().find(|s| (s.t - t).abs() <= 1e-9) {
        return Ok((s, s, 0.0));
    }
    let i = snaps.iter().position(|s| s.t > t).ok_or(AnalysisError::MissingSnapshot(t))?;
    if i == 0 {
        return Err(AnalysisError::MissingSnapshot(t));
    }
    let (a, b) = (&snaps[i - 1], &snaps[i]);
    Ok((a, b, (t - a.t) / (b.t - a.t)))
}

/// Samples `alpha` at every `(tau, z)` pair, interpolating cubically in `x`
/// and linearly in `t`. Output is ordered by `z`, then `tau`.
pub fn extract_alpha(run: &RunRecord, z_grid: &[f64], tau_list: &[f64], b: f64) -> Result<Vec<AlphaSample>, AnalysisError> {
    let x0 = -run.grid.half_length();
    let dx = run.grid.dx();
    let mut out = Vec::with_capacity(z_grid.len() * tau_list.len());
    for &z in z_grid {
        for &tau in tau_list {
            if !(tau > 0.0) {
                return Err(AnalysisError::BadTau(tau));
            }
            let (t, x) = from_hyperbolic(HyperbolicPoint { tau, z }, b);
            if !(t >= 0.0) {
                return Err(AnalysisError::OutsideCone { t, x });
            }
            let (s0, s1, w) = bracket(&run.snapshots, t)?;
            let at = |f: fn(&Snapshot) -> &Vec<f64>| -> Result<f64, AnalysisError> {
                let a = cubic_at(f(s0), x0, dx, x)?;
                if w == 0.0 {
                    return Ok(a);
                }
                Ok((1.0 - w) * a + w * cubic_at(f(s1), x0, dx, x)?)
            };
            let u = at(|s| &s.u)?;
            let ut = at(|s| &s.v)?;
            let ux = at(|s| &s.ux)?;
            out.push(AlphaSample { tau, z, alpha: alpha_from_fields(tau, z, u, ut, ux) });
        }
    }
    Ok(out)
}

pub fn write_alpha_csv<W: Write>(w: &mut W, samples: &[AlphaSample]) -> io::Result<()> {
    writeln!(w, "tau,z,re_alpha,im_alpha")?;
    for s in samples {
        writeln!(w, "{},{},{},{}", s.tau, s.z, s.alpha.re, s.alpha.im)?;
    }
    Ok(())
}

/// Straight-line fit of `1/|alpha|^2` against `log tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `slope / 2`
    pub kappa_re: f64,
    pub n_samples: usize,
}

pub const MODULATION_MIN_SAMPLES: usize = 20;

/// Recovers `Re kappa` from the exact modulus law
/// `d(1/|alpha|^2)/d(log tau) = 2 Re kappa`.
pub fn fit_modulation(samples: &[AlphaSample]) -> Result<ModulationFit, AnalysisError> {
    if samples.len() < MODULATION_MIN_SAMPLES {
        return Err(AnalysisError::TooFewSamples { need: MODULATION_MIN_SAMPLES, got: samples.len() });
    }
    let lo = samples.iter().map(|s| s.tau).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.tau).fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(AnalysisError::InsufficientWindow { lo, hi, why: "less than one decade in tau".into() });
    }
    if let Some(s) = samples.iter().find(|s| !(s.alpha.norm() >= 1e-12)) {
        return Err(AnalysisError::Degenerate(format!("|alpha| = {} at tau = {}", s.alpha.norm(), s.tau)));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.tau.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| 1.0 / s.alpha.norm_sqr()).collect();
    let line = fit::least_squares(&[&xs], &ys)?;
    Ok(ModulationFit {
        slope: line.coef[0],
        intercept: line.intercept,
        r_squared: line.r_squared,
        kappa_re: 0.5 * line.coef[0],
        n_samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg_solver::Grid1D;

    #[test]
    fn hyperbolic_examples() {
        let p = to_hyperbolic(5.0, 0.0, 1.5).unwrap();
        assert_eq!((p.tau, p.z), (8.0, 0.0));
        let p = to_hyperbolic(2.0, 1.0, 1.0).unwrap();
        assert!((p.tau - 15f64.sqrt()).abs() < 1e-14);
        assert!((p.z - 0.25f64.atanh()).abs() < 1e-15);
        assert!(to_hyperbolic(2.0, 4.0, 1.0).is_err());
        assert!(to_hyperbolic(2.0, -4.0, 1.0).is_err());
        let (t, x) = from_hyperbolic(HyperbolicPoint { tau: 7.0, z: 0.0 }, 2.0);
        assert_eq!((t, x), (3.0, 0.0));
    }

    #[test]
    fn lp_norm_examples() {
        let ones = vec![1.0; 200];
        assert!((lp_norm(&ones, 0.01, 2.0) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(lp_norm(&[0.5, -3.0, 2.0], 0.1, f64::INFINITY), 3.0);
        assert_eq!(lp_norm(&[0.0; 4], 0.1, 4.0), 0.0);

        let dx = 0.01;
        let g: Vec<f64> = (0..4001).map(|k| (-((k as f64 * dx - 20.0).powi(2))).exp()).collect();
        // integral of exp(-2x^2) is sqrt(pi/2)
        let exact = (std::f64::consts::PI / 2.0).sqrt().sqrt();
        assert!((lp_norm(&g, dx, 2.0) / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn plane_wave_gives_unit_alpha() {
        for tau in [10.0, 123.4, 999.0] {
            let sq = f64::sqrt(tau);
            let u = tau.cos() / sq;
            // at z = 0, d_t = d_tau
            let ut = -tau.sin() / sq - 0.5 * tau.cos() / (tau * sq);
            let a = alpha_from_fields(tau, 0.0, u, ut, 0.0);
            assert!((a - ComplexValue::new(1.0, 0.0)).norm() < 1e-12, "{a}");
        }
        assert_eq!(alpha_from_fields(50.0, 0.3, 0.0, 0.0, 0.0), ComplexValue::new(0.0, 0.0));
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let vals: Vec<f64> = (0..10).map(|k| f(-1.0 + 0.5 * k as f64)).collect();
        for x in [0.1, 0.77, 2.2] {
            assert!((cubic_at(&vals, -1.0, 0.5, x).unwrap() - f(x)).abs() < 1e-12);
        }
        assert!(cubic_at(&vals, -1.0, 0.5, -0.9).is_err());
    }

    #[test]
    fn extraction_on_zero_run() {
        let grid = Grid1D::new(64.0, 256).unwrap();
        let mut cfg = crate::kg_solver::SolverConfig::new(0.0, 3.0, 0.1, 20.0);
        cfg.record_times = vec![10.0, 20.0];
        let run = crate::kg_solver::run_simulation(&cfg, &crate::nonlinearity::CubicNonlinearity::zero(), &grid).unwrap();
        let s = extract_alpha(&run, &[0.0, 0.1], &[17.0, 25.0], 3.0).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|a| a.alpha.norm() == 0.0));
        assert_eq!(extract_alpha(&run, &[0.0], &[10.0], 3.0), Err(AnalysisError::MissingSnapshot(4.0)));
    }

    #[test]
    fn modulation_needs_a_decade() {
        let mk = |tau: f64| AlphaSample { tau, z: 0.0, alpha: ComplexValue::new(0.3, 0.0) };
        let short: Vec<_> = (0..30).map(|k| mk(100.0 + 10.0 * k as f64)).collect();
        assert!(matches!(fit_modulation(&short), Err(AnalysisError::InsufficientWindow { .. })));
        let few: Vec<_> = (0..5).map(|k| mk(10f64.powi(k))).collect();
        assert!(matches!(fit_modulation(&few), Err(AnalysisError::TooFewSamples { .. })));
        let flat: Vec<_> = (0..30).map(|k| mk(10f64.powf(2.0 + k as f64 / 20.0))).collect();
        assert!(fit_modulation(&flat).unwrap().slope.abs() < 1e-12);
    }
}
