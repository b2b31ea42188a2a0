//! The amplitude equation `d beta / d tau = -(kappa / tau) |beta|^2 beta + rho(tau)`
//! along a single ray, its closed-form solution, and the logarithmic phase
//! function `L(s, phi)`.

use crate::nonlinearity::{ComplexValue, CubicNonlinearity, NonlinearityError};
use crate::quad;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("L(s, phi) undefined: s = {s}, phi = {phi}")]
    LDomain { s: f64, phi: f64 },
    #[error("Re kappa = {0} is negative")]
    NegativeDamping(f64),
    #[error("tau0 = {0} must exceed 1")]
    BadTau0(f64),
    #[error("tau_end = {tau_end} must exceed tau0 = {tau0}")]
    BadEnd { tau0: f64, tau_end: f64 },
    #[error("at least 100 steps per decade required, got {0}")]
    TooFewSteps(usize),
    #[error("|beta| grew from {from:e} to {to:e} in one step at tau = {tau}")]
    StepRejected { tau: f64, from: f64, to: f64 },
    #[error("closed form undefined: 1 + 2 Re(kappa) |beta|^2 log(..) = {0} <= 0")]
    Denominator(f64),
    #[error("tau cosh z = {0} must exceed 1")]
    BadLightConeTime(f64),
    #[error("trajectory too short to fit beta_inf")]
    ShortTrajectory,
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
}

/// `L(s, phi) = -int_1^s d sigma / (sigma (1 + 2 phi log sigma))`.
///
/// Defined for every `s > 0` with `1 + 2 phi log s > 0`; continuous in `phi`
/// at zero where it reduces to `-log s`.
pub fn l_func(s: f64, phi: f64) -> Result<f64, ProfileError> {
    if !(s > 0.0) || !s.is_finite() || !phi.is_finite() {
        return Err(ProfileError::LDomain { s, phi });
    }
    let log_s = s.ln();
    let arg = 2.0 * phi * log_s;
    if !(1.0 + arg > 0.0) {
        return Err(ProfileError::LDomain { s, phi });
    }
    if phi == 0.0 {
        return Ok(-log_s);
    }
    // ln_1p keeps the small-phi limit accurate
    Ok(-arg.ln_1p() / (2.0 * phi))
}

/// Numerical quadrature of the integral defining [`l_func`], split into `n`
/// geometric panels in `sigma`.
pub fn l_func_quadrature(s: f64, phi: f64, n: usize) -> Result<f64, ProfileError> {
    if !(s > 0.0) || !s.is_finite() || !phi.is_finite() || !(1.0 + 2.0 * phi * s.ln() > 0.0) {
        return Err(ProfileError::LDomain { s, phi });
    }
    if s == 1.0 {
        return Ok(0.0);
    }
    let n = n.max(1);
    let integrand = |sigma: f64| 1.0 / (sigma * (1.0 + 2.0 * phi * sigma.ln()));
    let ratio = s.powf(1.0 / n as f64);
    let mut total = 0.0;
    let mut lo = 1.0f64;
    for k in 0..n {
        let hi = if k + 1 == n { s } else { lo * ratio };
        total += quad::integrate(integrand, lo, hi, 1, 1e-14);
        lo = hi;
    }
    Ok(-total)
}

/// Parameters of one amplitude equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub kappa: ComplexValue,
    pub beta0: ComplexValue,
    pub tau0: f64,
}

impl ProfileParams {
    pub fn new(kappa: ComplexValue, beta0: ComplexValue, tau0: f64) -> Result<Self, ProfileError> {
        if !(kappa.re >= 0.0) {
            return Err(ProfileError::NegativeDamping(kappa.re));
        }
        if !(tau0 > 1.0) {
            return Err(ProfileError::BadTau0(tau0));
        }
        Ok(Self { kappa, beta0, tau0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTrajectory {
    pub taus: Vec<f64>,
    pub betas: Vec<ComplexValue>,
}

impl ProfileTrajectory {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn last(&self) -> Option<(f64, ComplexValue)> {
        Some((*self.taus.last()?, *self.betas.last()?))
    }
}

pub const DEFAULT_STEPS_PER_DECADE: usize = 1000;

/// Classical RK4 on a uniform grid in `log tau`. In that variable the
/// unforced equation is autonomous: `d beta / d s = -kappa |beta|^2 beta`.
pub fn integrate_profile(
    params: &ProfileParams,
    forcing: Option<&dyn Fn(f64) -> ComplexValue>,
    tau_end: f64,
    steps_per_decade: usize,
) -> Result<ProfileTrajectory, ProfileError> {
    let ProfileParams { kappa, beta0, tau0 } = *params;
    if !(tau_end > tau0) {
        return Err(ProfileError::BadEnd { tau0, tau_end });
    }
    if steps_per_decade < 100 {
        return Err(ProfileError::TooFewSteps(steps_per_decade));
    }
    let span = (tau_end / tau0).ln();
    let n_steps = ((steps_per_decade as f64) * span / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;

    let rhs = |s: f64, b: ComplexValue| {
        let mut d = -kappa * b.norm_sqr() * b;
        if let Some(rho) = forcing {
            let tau = tau0 * s.exp();
            d += tau * rho(tau);
        }
        d
    };

    let mut taus = Vec::with_capacity(n_steps + 1);
    let mut betas = Vec::with_capacity(n_steps + 1);
    taus.push(tau0);
    betas.push(beta0);
    let mut b = beta0;
    for k in 0..n_steps {
        let s = h * k as f64;
        let k1 = rhs(s, b);
        let k2 = rhs(s + 0.5 * h, b + 0.5 * h * k1);
        let k3 = rhs(s + 0.5 * h, b + 0.5 * h * k2);
        let k4 = rhs(s + h, b + h * k3);
        let next = b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let tau = if k + 1 == n_steps { tau_end } else { tau0 * (s + h).exp() };
        let (from, to) = (b.norm(), next.norm());
        if !to.is_finite() || (from > 0.0 && to > 10.0 * from) {
            return Err(ProfileError::StepRejected { tau, from, to });
        }
        b = next;
        taus.push(tau);
        betas.push(b);
    }
    Ok(ProfileTrajectory { taus, betas })
}

/// Closed-form solution of the unforced equation started at `(tau0, beta0)`.
pub fn exact_profile(params: &ProfileParams, tau: f64) -> Result<ComplexValue, ProfileError> {
    let ProfileParams { kappa, beta0, tau0 } = *params;
    let m0 = beta0.norm_sqr();
    let ratio = tau / tau0;
    let denom = 1.0 + 2.0 * kappa.re * m0 * ratio.ln();
    if !(denom > 0.0) {
        return Err(ProfileError::Denominator(denom));
    }
    let modulus = (m0 / denom).sqrt();
    let phase = beta0.arg() + kappa.im * m0 * l_func(ratio, kappa.re * m0)?;
    Ok(ComplexValue::from_polar(modulus, phase))
}

/// `beta_inf exp(i Im kappa |beta_inf|^2 L(tau, Re kappa |beta_inf|^2)) / sqrt(1 + 2 Re kappa |beta_inf|^2 log tau)`.
pub fn asymptotic_form(kappa: ComplexValue, beta_inf: ComplexValue, tau: f64) -> Result<ComplexValue, ProfileError> {
    let m = beta_inf.norm_sqr();
    let denom = 1.0 + 2.0 * kappa.re * m * tau.ln();
    if !(denom > 0.0) {
        return Err(ProfileError::Denominator(denom));
    }
    let phase = kappa.im * m * l_func(tau, kappa.re * m)?;
    Ok(beta_inf * ComplexValue::from_polar(1.0 / denom.sqrt(), phase))
}

/// Solves [`asymptotic_form`] for `beta_inf` given one sample `beta(tau)`.
pub fn invert_asymptotic_form(kappa: ComplexValue, beta: ComplexValue, tau: f64) -> Result<ComplexValue, ProfileError> {
    let m = beta.norm_sqr();
    // |beta|^2 = b / (1 + 2 k b log tau)  =>  b = m / (1 - 2 k m log tau)
    let denom = 1.0 - 2.0 * kappa.re * m * tau.ln();
    if !(denom > 0.0) {
        return Err(ProfileError::Denominator(denom));
    }
    let b = m / denom;
    let phase = beta.arg() - kappa.im * b * l_func(tau, kappa.re * b)?;
    Ok(ComplexValue::from_polar(b.sqrt(), phase))
}

/// Average of the inverted closed form over the last 10% of a trajectory.
pub fn fit_beta_inf(kappa: ComplexValue, traj: &ProfileTrajectory) -> Result<ComplexValue, ProfileError> {
    let n = traj.len();
    if n < 10 {
        return Err(ProfileError::ShortTrajectory);
    }
    let start = n - (n / 10).max(1);
    let mut acc = ComplexValue::new(0.0, 0.0);
    for i in start..n {
        acc += invert_asymptotic_form(kappa, traj.betas[i], traj.taus[i])?;
    }
    Ok(acc / (n - start) as f64)
}

/// Leading profile `A(tau, z)` along the ray `z`, with the phase written
/// through `L(log(tau cosh z), .)`.
pub fn leading_profile_a(
    z: f64,
    tau: f64,
    beta_inf: ComplexValue,
    nl: &CubicNonlinearity,
    chi: impl Fn(f64) -> f64,
) -> Result<ComplexValue, ProfileError> {
    let k = nl.k_closed(z)?;
    let light = tau * z.cosh();
    if !(light > 1.0) {
        return Err(ProfileError::BadLightConeTime(light));
    }
    let w = chi(z).powi(2);
    let m = beta_inf.norm_sqr();
    let log_light = light.ln();
    let denom = 1.0 + 2.0 * w * k.re * m * log_light;
    if !(denom > 0.0) {
        return Err(ProfileError::Denominator(denom));
    }
    if m == 0.0 {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    let phase = w * k.im * m * l_func(log_light, w * k.re * m)?;
    Ok(beta_inf * ComplexValue::from_polar(1.0 / denom.sqrt(), phase))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub beta_inf: ComplexValue,
    pub taus: Vec<f64>,
    /// `|beta(tau) - asymptotic_form(tau)| * (log tau)^{3/2}`
    pub scaled: Vec<f64>,
    pub max: f64,
}

impl DeviationReport {
    /// Mean of the scaled deviation over `[lo, hi)`.
    pub fn mean_over(&self, lo: f64, hi: f64) -> Option<f64> {
        let (sum, n) = self
            .taus
            .iter()
            .zip(&self.scaled)
            .filter(|(t, _)| **t >= lo && **t < hi)
            .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

/// Integrates the forced equation, fits `beta_inf` from the tail, and
/// reports the `(log tau)^{3/2}`-scaled distance to the asymptotic form over
/// `tau_range`.
pub fn asymptotics_deviation(
    params: &ProfileParams,
    forcing: Option<&dyn Fn(f64) -> ComplexValue>,
    tau_range: (f64, f64),
    steps_per_decade: usize,
) -> Result<DeviationReport, ProfileError> {
    let traj = integrate_profile(params, forcing, tau_range.1, steps_per_decade)?;
    let beta_inf = fit_beta_inf(params.kappa, &traj)?;
    let mut taus = Vec::new();
    let mut scaled = Vec::new();
    for (&tau, &b) in traj.taus.iter().zip(&traj.betas) {
        if tau < tau_range.0 {
            continue;
        }
        let a = asymptotic_form(params.kappa, beta_inf, tau)?;
        taus.push(tau);
        scaled.push((b - a).norm() * tau.ln().powf(1.5));
    }
    let max = scaled.iter().copied().fold(0.0, f64::max);
    Ok(DeviationReport { beta_inf, taus, scaled, max })
}
