//! Pseudospectral solver for `(d_t^2 - d_x^2 + 1) u = F(u, u_t, u_x)` on a
//! periodic box that is kept wide enough for the wrap never to matter.

mod spectral;

pub use spectral::Propagator;

use crate::analysis::lp_norm;
use crate::nonlinearity::CubicNonlinearity;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

/// Extra room required beyond `T + B` between the data and the periodic wrap.
pub const PROPAGATION_MARGIN: f64 = 10.0;

/// Any recorded norm above `INSTABILITY_FACTOR * eps` aborts the run.
pub const INSTABILITY_FACTOR: f64 = 1e6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("instability at t = {t}: {what}")]
    Instability { t: f64, what: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_length: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self, SolverError> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(SolverError::Validation(format!("half length must be positive, got {half_length}")));
        }
        if n_points < 4 || !n_points.is_power_of_two() {
            return Err(SolverError::Validation(format!("N must be a power of two >= 4, got {n_points}")));
        }
        Ok(Self { half_length, n_points })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n_points as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_length + k as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.x(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    /// `u_t` at the nodes.
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn zeros(grid: &Grid1D) -> Self {
        Self { t: 0.0, u: vec![0.0; grid.n_points()], v: vec![0.0; grid.n_points()] }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    StrangSplit,
    Rk4Mol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataShape {
    /// `u_t(0) = 0`.
    Bump,
    /// `u_t(0)` equal to `u(0)`.
    BumpPair,
}

/// Smooth bump `eps * exp(1 - 1/(1 - (x/B)^2))` supported in `[-B, B]`.
pub fn bump(x: f64, b: f64, eps: f64) -> f64 {
    let s = x / b;
    if s.abs() >= 1.0 {
        0.0
    } else {
        eps * (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

pub fn bump_data(grid: &Grid1D, b: f64, eps: f64, shape: DataShape) -> FieldState {
    let u: Vec<f64> = grid.nodes().iter().map(|&x| bump(x, b, eps)).collect();
    let v = match shape {
        DataShape::Bump => vec![0.0; u.len()],
        DataShape::BumpPair => u.clone(),
    };
    FieldState { t: 0.0, u, v }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps: f64,
    /// Data support radius.
    pub b: f64,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Times at which full snapshots are kept.
    pub record_times: Vec<f64>,
    /// Spacing of the norm time series.
    pub norm_interval: f64,
    /// Exponents `p` of the recorded norms; `f64::INFINITY` for the sup norm.
    pub norm_ps: Vec<f64>,
    pub shape: DataShape,
}

impl SolverConfig {
    pub fn new(eps: f64, b: f64, dt: f64, t_final: f64) -> Self {
        Self {
            eps,
            b,
            dt,
            t_final,
            scheme: Scheme::StrangSplit,
            record_times: Vec::new(),
            norm_interval: 1.0,
            norm_ps: vec![2.0, 4.0, f64::INFINITY],
            shape: DataShape::Bump,
        }
    }

    pub fn validate(&self, grid: &Grid1D) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Validation(m));
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return bad(format!("eps must be finite and non-negative, got {}", self.eps));
        }
        if !(self.b.is_finite() && self.b > 1.0) {
            return bad(format!("B must exceed 1, got {}", self.b));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return bad(format!("T must be non-negative, got {}", self.t_final));
        }
        let need = self.t_final + self.b + PROPAGATION_MARGIN;
        if grid.half_length() < need {
            return bad(format!(
                "L = {} is below T + B + {} = {}: finite propagation speed keeps the solution inside |x| <= t + B \
                 only while that region stays off the periodic boundary",
                grid.half_length(),
                PROPAGATION_MARGIN,
                need
            ));
        }
        if self.scheme == Scheme::Rk4Mol && self.dt > grid.dx() / std::f64::consts::PI {
            return bad(format!("rk4_mol needs dt <= dx/pi = {}, got {}", grid.dx() / std::f64::consts::PI, self.dt));
        }
        if !(self.norm_interval.is_finite() && self.norm_interval > 0.0) {
            return bad(format!("norm interval must be positive, got {}", self.norm_interval));
        }
        if self.norm_ps.iter().any(|&p| p.is_nan() || p < 2.0) {
            return bad("norm exponents must satisfy 2 <= p <= inf".into());
        }
        if self.record_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("record times must be strictly increasing".into());
        }
        if self.record_times.iter().any(|&t| !(0.0..=self.t_final).contains(&t)) {
            return bad("record times must lie in [0, T]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub ux: Vec<f64>,
}

/// Norm time series, indexed `[p][time]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub ps: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub ut: Vec<Vec<f64>>,
    pub ux: Vec<Vec<f64>>,
}

impl NormSeries {
    fn new(ps: &[f64]) -> Self {
        Self {
            times: Vec::new(),
            ps: ps.to_vec(),
            u: vec![Vec::new(); ps.len()],
            ut: vec![Vec::new(); ps.len()],
            ux: vec![Vec::new(); ps.len()],
        }
    }

    pub fn p_index(&self, p: f64) -> Option<usize> {
        self.ps.iter().position(|&q| q == p || (q.is_infinite() && p.is_infinite()))
    }

    /// `||u_t|| + ||u_x||`.
    pub fn du(&self, i: usize) -> Vec<f64> {
        self.ut[i].iter().zip(&self.ux[i]).map(|(a, b)| a + b).collect()
    }

    fn push(&mut self, t: f64, u: &[f64], v: &[f64], ux: &[f64], dx: f64) {
        self.times.push(t);
        for (i, &p) in self.ps.iter().enumerate() {
            self.u[i].push(lp_norm(u, dx, p));
            self.ut[i].push(lp_norm(v, dx, p));
            self.ux[i].push(lp_norm(ux, dx, p));
        }
    }

    fn last_exceeding(&self, limit: f64) -> Option<String> {
        for (i, &p) in self.ps.iter().enumerate() {
            for (name, s) in [("u", &self.u[i]), ("u_t", &self.ut[i]), ("u_x", &self.ux[i])] {
                let x = *s.last()?;
                if !x.is_finite() || x > limit {
                    return Some(format!("L^{p} norm of {name} is {x}"));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub grid: Grid1D,
    pub config: SolverConfig,
    pub snapshots: Vec<Snapshot>,
    pub norms: NormSeries,
}

impl RunRecord {
    /// Snapshot whose time equals `t` up to `1e-9`.
    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= 1e-9)
    }
}

/// Writes one snapshot as CSV rows `t,x,u,v,ux`.
pub fn write_snapshot_csv<W: Write>(w: &mut W, grid: &Grid1D, snap: &Snapshot) -> io::Result<()> {
    writeln!(w, "t,x,u,v,ux")?;
    for k in 0..grid.n_points() {
        writeln!(w, "{},{},{},{},{}", snap.t, grid.x(k), snap.u[k], snap.v[k], snap.ux[k])?;
    }
    Ok(())
}

/// Writes the norm series as long-format CSV rows `t,p,field,norm`.
pub fn write_norms_csv<W: Write>(w: &mut W, norms: &NormSeries) -> io::Result<()> {
    writeln!(w, "t,p,field,norm")?;
    for (i, &p) in norms.ps.iter().enumerate() {
        let du = norms.du(i);
        for (field, s) in [("u", &norms.u[i]), ("ut", &norms.ut[i]), ("ux", &norms.ux[i]), ("du", &du)] {
            for (t, x) in norms.times.iter().zip(s.iter()) {
                writeln!(w, "{},{},{},{}", t, fmt_p(p), field, x)?;
            }
        }
    }
    Ok(())
}

pub fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// Times at which something must be recorded, sorted and deduplicated.
fn event_times(config: &SolverConfig) -> (Vec<f64>, Vec<f64>) {
    let t_final = config.t_final;
    let n_norm = (t_final / config.norm_interval + 1e-9).floor() as usize;
    let mut norm_times: Vec<f64> = (0..=n_norm).map(|i| i as f64 * config.norm_interval).collect();
    if norm_times.last().map_or(true, |&t| t_final - t > 1e-9) {
        norm_times.push(t_final);
    }
    let mut all: Vec<f64> = norm_times.iter().chain(&config.record_times).copied().collect();
    all.push(t_final);
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    (all, norm_times)
}

fn contains_time(list: &[f64], t: f64) -> bool {
    list.iter().any(|&s| (s - t).abs() <= 1e-9)
}

/// Rotation table for one step size.
struct Rotation {
    h: f64,
    cos: Vec<f64>,
    sin_over_w: Vec<f64>,
    w_sin: Vec<f64>,
}

impl Rotation {
    fn new(prop: &Propagator, h: f64) -> Self {
        let n = prop.n();
        let mut cos = Vec::with_capacity(n);
        let mut sin_over_w = Vec::with_capacity(n);
        let mut w_sin = Vec::with_capacity(n);
        for &xi in prop.wavenumbers() {
            let w = (1.0 + xi * xi).sqrt();
            let (s, c) = (h * w).sin_cos();
            cos.push(c);
            sin_over_w.push(s / w);
            w_sin.push(w * s);
        }
        Self { h, cos, sin_over_w, w_sin }
    }

    fn apply(&self, uh: &mut [Complex64], vh: &mut [Complex64]) {
        for k in 0..uh.len() {
            let (u0, v0) = (uh[k], vh[k]);
            uh[k] = self.cos[k] * u0 + self.sin_over_w[k] * v0;
            vh[k] = -self.w_sin[k] * u0 + self.cos[k] * v0;
        }
    }
}

/// Solves the Cauchy problem with bump data, recording norms every
/// `norm_interval` and snapshots at `record_times`. Steps are shortened to
/// land exactly on every output time.
pub fn run_simulation(config: &SolverConfig, nl: &CubicNonlinearity, grid: &Grid1D) -> Result<RunRecord, SolverError> {
    config.validate(grid)?;
    let prop = Propagator::new(*grid);
    let dx = grid.dx();
    let limit = INSTABILITY_FACTOR * config.eps;
    let init = bump_data(grid, config.b, config.eps, config.shape);
    let (mut uh, mut vh) = prop.fft_pair(&init.u, &init.v);

    let (events, norm_times) = event_times(config);
    let mut norms = NormSeries::new(&config.norm_ps);
    let mut snapshots = Vec::new();

    let mut record = |t: f64, uh: &[Complex64], vh: &[Complex64]| -> Result<(), SolverError> {
        let want_norm = contains_time(&norm_times, t);
        let want_snap = contains_time(&config.record_times, t);
        if !(want_norm || want_snap) {
            return Ok(());
        }
        let (u, ux) = prop.u_and_ux(uh);
        let (v, _) = prop.ifft_pair(vh, &vec![Complex64::new(0.0, 0.0); vh.len()]);
        if want_norm {
            norms.push(t, &u, &v, &ux, dx);
            if let Some(what) = norms.last_exceeding(limit) {
                return Err(SolverError::Instability { t, what });
            }
        }
        if want_snap {
            snapshots.push(Snapshot { t, u, v, ux });
        }
        Ok(())
    };

    let mut t = 0.0;
    record(t, &uh, &vh)?;
    let mut half = Rotation::new(&prop, 0.5 * config.dt);
    let mut ev = events.iter().copied().filter(|&e| e > 1e-9).peekable();
    while let Some(&next) = ev.peek() {
        let remaining = next - t;
        let (h, lands) = if remaining <= config.dt * (1.0 + 1e-9) {
            (remaining, true)
        } else {
            (config.dt, false)
        };
        match config.scheme {
            Scheme::StrangSplit => {
                if (half.h - 0.5 * h).abs() > 1e-15 * h.max(1.0) {
                    half = Rotation::new(&prop, 0.5 * h);
                }
                half.apply(&mut uh, &mut vh);
                if !nl.is_zero() {
                    let (u, ux) = prop.u_and_ux(&uh);
                    let (v, _) = prop.ifft_pair(&vh, &vec![Complex64::new(0.0, 0.0); vh.len()]);
                    let inc = prop.nonlinear_increment(nl, &u, &ux, &v, h);
                    if inc.iter().any(|x| !x.is_finite() || x.abs() > limit) {
                        return Err(SolverError::Instability {
                            t: t + h,
                            what: "nonlinear increment overflowed".into(),
                        });
                    }
                    let mut inc_h = prop.fft_real(&inc);
                    prop.dealias(&mut inc_h);
                    for (a, d) in vh.iter_mut().zip(&inc_h) {
                        *a += d;
                    }
                }
                half.apply(&mut uh, &mut vh);
            }
            Scheme::Rk4Mol => prop.rk4_spectral(nl, &mut uh, &mut vh, h),
        }
        if lands {
            t = next;
            ev.next();
            record(t, &uh, &vh)?;
        } else {
            t += h;
        }
    }

    Ok(RunRecord { grid: *grid, config: config.clone(), snapshots, norms })
}
