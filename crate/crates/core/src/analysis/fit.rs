use super::AnalysisError;
use crate::classifier::{DecayLaw, NormTarget};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Earliest time admitted into a decay fit.
pub const FIT_MIN_T: f64 = 20.0;
/// Allowed shortfall of the fitted log exponent below the predicted one.
pub const Q_MARGIN: f64 = 0.15;
/// RMS residual of `log y` above which a fit is not trusted.
pub const RESIDUAL_THRESHOLD: f64 = 0.05;
/// Below this ratio of accumulated dissipation to initial amplitude the
/// window has not reached the logarithmic regime.
pub const PRE_ASYMPTOTIC_RATIO: f64 = 3.0;

pub(crate) struct Regression {
    pub intercept: f64,
    pub coef: Vec<f64>,
    pub r_squared: f64,
    pub rms: f64,
}

/// Ordinary least squares with intercept, solved by modified Gram-Schmidt on
/// the centred columns.
pub(crate) fn least_squares(cols: &[&[f64]], y: &[f64]) -> Result<Regression, AnalysisError> {
    let n = y.len();
    let k = cols.len();
    if n < k + 2 || cols.iter().any(|c| c.len() != n) {
        return Err(AnalysisError::TooFewSamples { need: k + 2, got: n });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let ym = mean(y);
    let mut q: Vec<Vec<f64>> = cols.iter().zip(&means).map(|(c, m)| c.iter().map(|x| x - m).collect()).collect();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (x, a) in q[j].iter_mut().zip(&qi) {
                *x -= d * a;
            }
        }
        let nrm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(nrm > 1e-12) {
            return Err(AnalysisError::Degenerate("regressors are collinear or constant".into()));
        }
        r[j][j] = nrm;
        q[j].iter_mut().for_each(|x| *x /= nrm);
    }
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let qty: Vec<f64> = q.iter().map(|qj| qj.iter().zip(&yc).map(|(a, b)| a * b).sum()).collect();
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = (j + 1..k).map(|i| r[j][i] * coef[i]).sum();
        coef[j] = (qty[j] - s) / r[j][j];
    }
    let intercept = ym - coef.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();
    let mut ss_res = 0.0;
    for (i, yv) in y.iter().enumerate() {
        let pred = intercept + coef.iter().zip(cols).map(|(c, col)| c * col[i]).sum::<f64>();
        ss_res += (yv - pred).powi(2);
    }
    let ss_tot: f64 = yc.iter().map(|v| v * v).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    if !coef.iter().all(|c| c.is_finite()) {
        return Err(AnalysisError::Degenerate("non-finite coefficients".into()));
    }
    Ok(Regression { intercept, coef, r_squared, rms: (ss_res / n as f64).sqrt() })
}

/// Fitted logarithmic exponents of a norm series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(with = "super::serde_float")]
    pub p: f64,
    pub target: NormTarget,
    /// `1/2 - 1/p`
    pub a_fixed: f64,
    pub q_fit: f64,
    pub r_fit: Option<f64>,
    /// RMS residual of `log y`.
    pub residual: f64,
    pub window: (f64, f64),
    /// `c1 log(2+t_max) / c0` from the fit `y^-2 = c0 + c1 log(2+t)`;
    /// negative when the series does not decay at all.
    #[serde(with = "super::serde_float")]
    pub dissipation_ratio: f64,
}

fn check_window(times: &[f64], norms: &[f64], p: f64) -> Result<(f64, f64), AnalysisError> {
    if times.len() != norms.len() {
        return Err(AnalysisError::Domain("times and norms differ in length".into()));
    }
    if !(p >= 2.0) {
        return Err(AnalysisError::Domain(format!("p must be >= 2, got {p}")));
    }
    if times.len() < 4 {
        return Err(AnalysisError::TooFewSamples { need: 4, got: times.len() });
    }
    let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo < FIT_MIN_T {
        return Err(AnalysisError::InsufficientWindow { lo, hi, why: format!("starts before t = {FIT_MIN_T}") });
    }
    if hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(AnalysisError::InsufficientWindow { lo, hi, why: "spans less than one decade".into() });
    }
    if norms.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
        return Err(AnalysisError::Degenerate("norms must be positive and finite".into()));
    }
    Ok((lo, hi))
}

fn free_rate_removed(times: &[f64], norms: &[f64], p: f64) -> (f64, Vec<f64>) {
    let a = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
    (a, times.iter().zip(norms).map(|(t, n)| n * (1.0 + t).powf(a)).collect())
}

fn dissipation_ratio(times: &[f64], y: &[f64], hi: f64) -> f64 {
    let x: Vec<f64> = times.iter().map(|t| (2.0 + t).ln()).collect();
    let w: Vec<f64> = y.iter().map(|v| v.powi(-2)).collect();
    match least_squares(&[&x], &w) {
        Ok(r) if r.intercept > 0.0 => r.coef[0] * (2.0 + hi).ln() / r.intercept,
        Ok(r) if r.coef[0] <= 0.0 => -1.0,
        _ => f64::INFINITY,
    }
}

/// Regresses `log y` on `log log(2+t)`, where `y = norm (1+t)^{1/2-1/p}`;
/// `q_fit` is minus the slope.
pub fn fit_decay(times: &[f64], norms: &[f64], p: f64, target: NormTarget) -> Result<DecayFit, AnalysisError> {
    let window = check_window(times, norms, p)?;
    let (a, y) = free_rate_removed(times, norms, p);
    let ll: Vec<f64> = times.iter().map(|t| (2.0 + t).ln().ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let reg = least_squares(&[&ll], &ly)?;
    Ok(DecayFit {
        p,
        target,
        a_fixed: a,
        q_fit: -reg.coef[0],
        r_fit: None,
        residual: reg.rms,
        window,
        dissipation_ratio: dissipation_ratio(times, &y, window.1),
    })
}

/// As [`fit_decay`] with a second regressor `log log(1 + log(2+t))` whose
/// coefficient is `r_fit`.
pub fn fit_decay_loglog(times: &[f64], norms: &[f64], p: f64, target: NormTarget) -> Result<DecayFit, AnalysisError> {
    let window = check_window(times, norms, p)?;
    let (a, y) = free_rate_removed(times, norms, p);
    let ll: Vec<f64> = times.iter().map(|t| (2.0 + t).ln().ln()).collect();
    let lll: Vec<f64> = times.iter().map(|t| (1.0 + (2.0 + t).ln()).ln().ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let reg = least_squares(&[&ll, &lll], &ly)?;
    Ok(DecayFit {
        p,
        target,
        a_fixed: a,
        q_fit: -reg.coef[0],
        r_fit: Some(reg.coef[1]),
        residual: reg.rms,
        window,
        dissipation_ratio: dissipation_ratio(times, &y, window.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    #[serde(with = "super::serde_float")]
    pub q_predicted: f64,
    #[serde(with = "super::serde_float")]
    pub q_fit: f64,
    /// `q_fit - q_predicted`
    #[serde(with = "super::serde_float")]
    pub margin: f64,
    pub diagnosis: String,
}

/// The predicted rates are upper bounds, so any `q_fit` at or above
/// `q_predicted - Q_MARGIN` counts as consistent.
pub fn compare_with_theorem(fit: &DecayFit, law: &DecayLaw) -> Verdict {
    let q_predicted = match law.exponents(fit.target, fit.p) {
        Ok(e) => e.q,
        Err(e) => {
            return Verdict {
                kind: VerdictKind::Inconclusive,
                q_predicted: f64::NAN,
                q_fit: fit.q_fit,
                margin: f64::NAN,
                diagnosis: format!("no prediction: {e}"),
            }
        }
    };
    let margin = fit.q_fit - q_predicted;
    let (kind, diagnosis) = if margin >= -Q_MARGIN && fit.residual <= RESIDUAL_THRESHOLD {
        (VerdictKind::Consistent, format!("q_fit {:.3} vs predicted {:.3}", fit.q_fit, q_predicted))
    } else if fit.dissipation_ratio < PRE_ASYMPTOTIC_RATIO {
        (
            VerdictKind::Inconclusive,
            format!(
                "pre-asymptotic window [{}, {}]: accumulated log damping is {:.2} of the initial amplitude term \
                 (needs {PRE_ASYMPTOTIC_RATIO}), residual {:.3}",
                fit.window.0, fit.window.1, fit.dissipation_ratio, fit.residual
            ),
        )
    } else if margin >= -Q_MARGIN {
        (VerdictKind::Inconclusive, format!("residual {:.3} above {RESIDUAL_THRESHOLD}", fit.residual))
    } else {
        (
            VerdictKind::Inconsistent,
            format!("q_fit {:.3} below predicted {:.3} by more than {Q_MARGIN}", fit.q_fit, q_predicted),
        )
    };
    Verdict { kind, q_predicted, q_fit: fit.q_fit, margin, diagnosis }
}

/// Centred moving average over a time window of width `width`; the window
/// shrinks symmetrically near the ends.
pub fn moving_average(times: &[f64], values: &[f64], width: f64) -> Vec<f64> {
    let n = times.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + values[i];
    }
    let half = 0.5 * width;
    (0..n)
        .map(|i| {
            let reach = half.min(times[i] - times[0]).min(times[n - 1] - times[i]);
            let lo = times.partition_point(|&t| t < times[i] - reach - 1e-12);
            let hi = times.partition_point(|&t| t <= times[i] + reach + 1e-12);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub holds: bool,
    /// Largest relative rise between consecutive checkpoints.
    pub max_rise: f64,
    pub at: f64,
}

/// Checks `values[j+1] <= values[j] (1 + tol)` between consecutive
/// checkpoints, taken every `step` time units inside `[lo, hi]` plus the
/// last sample in range.
pub fn non_increasing(times: &[f64], values: &[f64], lo: f64, hi: f64, step: f64, tol: f64) -> Monotonicity {
    let mut checkpoints = Vec::new();
    let mut next = lo;
    let mut last_inside = None;
    for (&t, &v) in times.iter().zip(values) {
        if t > hi + 1e-9 {
            break;
        }
        if t >= next - 1e-9 {
            checkpoints.push((t, v));
            next = t + step;
        } else if t >= lo {
            last_inside = Some((t, v));
        }
    }
    // the end of the range is always checked
    if let Some(end) = last_inside {
        if checkpoints.last().map_or(false, |c| c.0 < end.0) {
            checkpoints.push(end);
        }
    }
    let mut worst = Monotonicity { holds: true, max_rise: f64::NEG_INFINITY, at: lo };
    for w in checkpoints.windows(2) {
        let rise = w[1].1 / w[0].1 - 1.0;
        if rise > worst.max_rise {
            worst.max_rise = rise;
            worst.at = w[1].0;
        }
    }
    worst.holds = worst.max_rise <= tol;
    worst
}

/// `int_0^2 (1 + eta^m log(t+2))^{-p/2} d eta`.
pub fn i_p_m(t: f64, m: u32, p: f64) -> Result<f64, AnalysisError> {
    if !(t >= 0.0) || !(1..=3).contains(&m) || !(p > 0.0) {
        return Err(AnalysisError::Domain(format!("need t >= 0, m in 1..=3, p > 0; got t={t}, m={m}, p={p}")));
    }
    if !(m as f64 * p > 2.0 || (m == 1 && p == 2.0)) {
        return Err(AnalysisError::Domain(format!("need m p > 2 or (m, p) = (1, 2); got ({m}, {p})")));
    }
    let lg = (t + 2.0).ln();
    let f = |eta: f64| (1.0 + eta.powi(m as i32) * lg).powf(-0.5 * p);
    // the integrand varies on the scale lg^{-1/m} near eta = 0
    let knee = lg.powf(-1.0 / m as f64).min(2.0);
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = knee;
    loop {
        total += quad::integrate(f, a, b, 4, 1e-13);
        if b >= 2.0 {
            break;
        }
        a = b;
        b = (4.0 * b).min(2.0);
    }
    Ok(total)
}
