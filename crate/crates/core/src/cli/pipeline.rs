//! Measurement steps shared by the `fit` and `report` commands.

use crate::analysis::{
    compare_with_theorem, fit_decay, fit_decay_loglog, fit_modulation, moving_average, non_increasing, AlphaSample,
    AnalysisError, DecayFit, ModulationFit, Monotonicity, Verdict, VerdictKind,
};
use crate::classifier::{DecayLaw, NormTarget};
use crate::kg_solver::NormSeries;
use crate::nonlinearity::CubicNonlinearity;
use serde::{Deserialize, Serialize};

/// Spacing of the checkpoints used for the monotonicity test.
pub const MONOTONE_STEP: f64 = 50.0;
/// Relative rise tolerated between checkpoints of a smoothed series.
pub const MONOTONE_TOL: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayAssessment {
    #[serde(with = "crate::analysis::serde_float")]
    pub p: f64,
    pub target: NormTarget,
    /// Whether the predicted rate beats the free rate for this norm.
    pub enhanced: bool,
    pub fit: Option<DecayFit>,
    pub verdict: Verdict,
    /// Monotonicity of `norm (1+t)^{1/2-1/p}` after smoothing.
    pub monotone: Monotonicity,
}

impl DecayAssessment {
    /// Monotone where the law predicts a gain, and the fit is not rejected.
    pub fn passes(&self) -> bool {
        (!self.enhanced || self.monotone.holds) && self.verdict.kind != VerdictKind::Inconsistent
    }
}

fn series_for(norms: &NormSeries, i: usize, target: NormTarget) -> Vec<f64> {
    match target {
        NormTarget::U => norms.u[i].clone(),
        NormTarget::Du => norms.du(i),
    }
}

/// Smooths one norm series, checks monotonicity of the rescaled series and
/// fits its logarithmic exponent over `window`.
pub fn assess_decay(
    times: &[f64],
    norm: &[f64],
    p: f64,
    target: NormTarget,
    law: &DecayLaw,
    window: [f64; 2],
    smoothing_width: f64,
) -> DecayAssessment {
    let smooth = if smoothing_width > 0.0 { moving_average(times, norm, smoothing_width) } else { norm.to_vec() };
    let a = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
    let y: Vec<f64> = times.iter().zip(&smooth).map(|(t, n)| n * (1.0 + t).powf(a)).collect();
    // near the ends the averaging window is truncated and the carrier leaks back in
    let t_last = times.last().copied().unwrap_or(0.0);
    let check_hi = window[1].min(t_last - 0.5 * smoothing_width);
    let monotone = non_increasing(times, &y, window[0], check_hi, MONOTONE_STEP, MONOTONE_TOL);

    let (wt, wn): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&smooth)
        .filter(|(t, _)| **t >= window[0] - 1e-9 && **t <= window[1] + 1e-9)
        .map(|(t, n)| (*t, *n))
        .unzip();
    let wants_loglog = law.exponents(target, p).map_or(false, |e| e.r != 0.0);
    let fitted = if wants_loglog {
        fit_decay_loglog(&wt, &wn, p, target)
    } else {
        fit_decay(&wt, &wn, p, target)
    };
    let (fit, verdict) = match fitted {
        Ok(f) => {
            let v = compare_with_theorem(&f, law);
            (Some(f), v)
        }
        Err(e) => (None, inconclusive(law, target, p, &e)),
    };
    DecayAssessment { p, target, enhanced: law.enhances(target, p), fit, verdict, monotone }
}

fn inconclusive(law: &DecayLaw, target: NormTarget, p: f64, e: &AnalysisError) -> Verdict {
    let q_predicted = law.exponents(target, p).map_or(f64::NAN, |e| e.q);
    Verdict {
        kind: VerdictKind::Inconclusive,
        q_predicted,
        q_fit: f64::NAN,
        margin: f64::NAN,
        diagnosis: format!("fit failed: {e}"),
    }
}

/// One assessment per recorded `p` and target, in recording order.
pub fn assess_all(norms: &NormSeries, law: &DecayLaw, window: [f64; 2], smoothing_width: f64) -> Vec<DecayAssessment> {
    let mut out = Vec::new();
    for (i, &p) in norms.ps.iter().enumerate() {
        for target in NormTarget::ALL {
            let s = series_for(norms, i, target);
            out.push(assess_decay(&norms.times, &s, p, target, law, window, smoothing_width));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationReport {
    pub z: f64,
    #[serde(with = "crate::analysis::serde_float")]
    pub kappa_predicted: f64,
    pub fit: Option<ModulationFit>,
    /// `|kappa_fit / kappa_predicted - 1|`; absent when nothing is predicted.
    pub relative_error: Option<f64>,
    pub note: String,
}

/// Modulation fits per distinct `z` in the samples.
pub fn modulation_reports(samples: &[AlphaSample], nl: &CubicNonlinearity) -> Vec<ModulationReport> {
    let mut zs: Vec<f64> = samples.iter().map(|s| s.z).collect();
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    zs.into_iter()
        .map(|z| {
            let at: Vec<AlphaSample> = samples.iter().filter(|s| s.z == z).copied().collect();
            let kappa_predicted = nl.k_closed(z).map_or(f64::NAN, |k| k.re);
            match fit_modulation(&at) {
                Ok(f) => {
                    let relative_error =
                        (kappa_predicted.abs() > 0.0).then(|| (f.kappa_re / kappa_predicted - 1.0).abs());
                    ModulationReport { z, kappa_predicted, fit: Some(f), relative_error, note: String::new() }
                }
                Err(e) => ModulationReport { z, kappa_predicted, fit: None, relative_error: None, note: e.to_string() },
            }
        })
        .collect()
}
