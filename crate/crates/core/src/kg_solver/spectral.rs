//! Fourier machinery for the periodic grid: FFT plans, wavenumbers, the exact
//! linear propagator, and the split/unsplit time steps.

use super::{FieldState, Grid1D};
use crate::nonlinearity::CubicNonlinearity;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Propagator {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Angular wavenumbers in FFT order.
    xi: Vec<f64>,
    /// `sqrt(1 + xi^2)`
    omega: Vec<f64>,
    /// Multiplier for the spectral x-derivative (zero at Nyquist).
    ikx: Vec<Complex64>,
    /// 2/3-rule mask.
    keep: Vec<bool>,
}

impl Propagator {
    pub fn new(grid: Grid1D) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = std::f64::consts::PI / grid.half_length();
        let xi: Vec<f64> = (0..n)
            .map(|k| {
                let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                base * signed
            })
            .collect();
        let omega = xi.iter().map(|x| (1.0 + x * x).sqrt()).collect();
        let ikx = (0..n)
            .map(|k| if k == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, xi[k]) })
            .collect();
        let cut = n / 3;
        let keep = (0..n).map(|k| k <= cut || k >= n - cut).collect();
        Self { grid, forward, inverse, xi, omega, ikx, keep }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    /// Transforms two real signals with a single complex FFT.
    pub(crate) fn fft_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n();
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.forward.process(&mut z);
        let mut ah = vec![Complex64::new(0.0, 0.0); n];
        let mut bh = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let zk = z[k];
            let zm = z[(n - k) % n].conj();
            ah[k] = 0.5 * (zk + zm);
            bh[k] = Complex64::new(0.0, -0.5) * (zk - zm);
        }
        (ah, bh)
    }

    pub(crate) fn fft_real(&self, a: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut z);
        z
    }

    /// Inverse of two Hermitian spectra, returned as two real signals.
    pub(crate) fn ifft_pair(&self, ah: &[Complex64], bh: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let mut z: Vec<Complex64> = ah.iter().zip(bh).map(|(&a, &b)| a + Complex64::i() * b).collect();
        self.inverse.process(&mut z);
        let scale = 1.0 / n as f64;
        z.iter().map(|c| (c.re * scale, c.im * scale)).unzip()
    }

    /// Spectral x-derivative of a real signal.
    pub fn derivative(&self, a: &[f64]) -> Vec<f64> {
        let mut ah = self.fft_real(a);
        for (c, m) in ah.iter_mut().zip(&self.ikx) {
            *c *= m;
        }
        self.inverse.process(&mut ah);
        let scale = 1.0 / self.n() as f64;
        ah.iter().map(|c| c.re * scale).collect()
    }

    /// `(u, u_x)` from the spectrum of `u`.
    pub(crate) fn u_and_ux(&self, uh: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let duh: Vec<Complex64> = uh.iter().zip(&self.ikx).map(|(a, m)| a * m).collect();
        self.ifft_pair(uh, &duh)
    }

    /// Exact flow of `u_tt - u_xx + u = 0` on the spectra, in place.
    pub(crate) fn rotate(&self, uh: &mut [Complex64], vh: &mut [Complex64], dt: f64) {
        for k in 0..uh.len() {
            let w = self.omega[k];
            let (s, c) = (dt * w).sin_cos();
            let (u0, v0) = (uh[k], vh[k]);
            uh[k] = c * u0 + (s / w) * v0;
            vh[k] = -w * s * u0 + c * v0;
        }
    }

    /// Exact linear propagator over `dt` (any sign).
    pub fn linear_step(&self, state: &FieldState, dt: f64) -> FieldState {
        if dt == 0.0 {
            return state.clone();
        }
        let (mut uh, mut vh) = self.fft_pair(&state.u, &state.v);
        self.rotate(&mut uh, &mut vh, dt);
        let (u, v) = self.ifft_pair(&uh, &vh);
        FieldState { t: state.t + dt, u, v }
    }

    /// Pointwise RK4 increment of `v' = F(u, v, u_x)` with `u`, `u_x` frozen.
    pub(crate) fn nonlinear_increment(&self, nl: &CubicNonlinearity, u: &[f64], ux: &[f64], v: &[f64], dt: f64) -> Vec<f64> {
        u.iter()
            .zip(ux)
            .zip(v)
            .map(|((&u, &ux), &v0)| {
                let [c0, c1, c2, c3] = nl.coefficients_in_ut(u, ux);
                let f = |v: f64| c0 + v * (c1 + v * (c2 + v * c3));
                let k1 = f(v0);
                let k2 = f(v0 + 0.5 * dt * k1);
                let k3 = f(v0 + 0.5 * dt * k2);
                let k4 = f(v0 + dt * k3);
                dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            })
            .collect()
    }

    /// Zeroes the upper third of the spectrum.
    pub(crate) fn dealias(&self, spec: &mut [Complex64]) {
        for (c, &keep) in spec.iter_mut().zip(&self.keep) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Nonlinear substep: `u` is held fixed and `v` advanced by one RK4 step
    /// of `v' = F(u, v, u_x)`; the increment is de-aliased by the 2/3 rule.
    pub fn nonlinear_step(&self, state: &FieldState, nl: &CubicNonlinearity, dt: f64) -> FieldState {
        if dt == 0.0 || nl.is_zero() {
            return FieldState { t: state.t, u: state.u.clone(), v: state.v.clone() };
        }
        let ux = self.derivative(&state.u);
        let inc = self.nonlinear_increment(nl, &state.u, &ux, &state.v, dt);
        let mut inc_h = self.fft_real(&inc);
        self.dealias(&mut inc_h);
        self.inverse.process(&mut inc_h);
        let scale = 1.0 / self.n() as f64;
        let v = state.v.iter().zip(&inc_h).map(|(v, d)| v + d.re * scale).collect();
        FieldState { t: state.t, u: state.u.clone(), v }
    }

    /// Strang splitting: half linear, full nonlinear, half linear.
    pub fn step_strang(&self, state: &FieldState, nl: &CubicNonlinearity, dt: f64) -> FieldState {
        let half = self.linear_step(state, 0.5 * dt);
        let mid = self.nonlinear_step(&half, nl, dt);
        let mut out = self.linear_step(&mid, 0.5 * dt);
        out.t = state.t + dt;
        out
    }

    /// Spectral right-hand side of the first-order system, with the
    /// nonlinearity de-aliased.
    fn mol_rhs(&self, nl: &CubicNonlinearity, uh: &[Complex64], vh: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut dv: Vec<Complex64> = uh.iter().zip(&self.omega).map(|(u, w)| -(w * w) * u).collect();
        if !nl.is_zero() {
            let (u, ux) = self.u_and_ux(uh);
            let (v, _) = self.ifft_pair(vh, &vec![Complex64::new(0.0, 0.0); vh.len()]);
            let f: Vec<f64> = u.iter().zip(&ux).zip(&v).map(|((&u, &ux), &v)| nl.eval(u, v, ux)).collect();
            let mut fh = self.fft_real(&f);
            self.dealias(&mut fh);
            for (d, f) in dv.iter_mut().zip(&fh) {
                *d += f;
            }
        }
        (vh.to_vec(), dv)
    }

    /// Classical RK4 on the semidiscrete system `u_t = v`, `v_t = u_xx - u + F`.
    pub(crate) fn rk4_spectral(&self, nl: &CubicNonlinearity, uh: &mut [Complex64], vh: &mut [Complex64], dt: f64) {
        let axpy = |x: &[Complex64], a: f64, y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(x, y)| x + a * y).collect()
        };
        let (k1u, k1v) = self.mol_rhs(nl, uh, vh);
        let (k2u, k2v) = self.mol_rhs(nl, &axpy(uh, 0.5 * dt, &k1u), &axpy(vh, 0.5 * dt, &k1v));
        let (k3u, k3v) = self.mol_rhs(nl, &axpy(uh, 0.5 * dt, &k2u), &axpy(vh, 0.5 * dt, &k2v));
        let (k4u, k4v) = self.mol_rhs(nl, &axpy(uh, dt, &k3u), &axpy(vh, dt, &k3v));
        for k in 0..uh.len() {
            uh[k] += dt / 6.0 * (k1u[k] + 2.0 * k2u[k] + 2.0 * k3u[k] + k4u[k]);
            vh[k] += dt / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
        }
    }

    pub fn step_rk4_mol(&self, state: &FieldState, nl: &CubicNonlinearity, dt: f64) -> FieldState {
        let (mut uh, mut vh) = self.fft_pair(&state.u, &state.v);
        self.rk4_spectral(nl, &mut uh, &mut vh, dt);
        let (u, v) = self.ifft_pair(&uh, &vh);
        FieldState { t: state.t + dt, u, v }
    }

    /// Discrete linear energy `1/2 sum (v^2 + u_x^2 + u^2) dx`, evaluated by
    /// Parseval with the full `xi^2` on every mode. The Nyquist mode counts
    /// here although the derivative drops it, so this is the quantity the
    /// exact rotation conserves.
    pub fn linear_energy(&self, state: &FieldState) -> f64 {
        let (uh, vh) = self.fft_pair(&state.u, &state.v);
        let sum: f64 = uh
            .iter()
            .zip(&vh)
            .zip(&self.omega)
            .map(|((a, b), w)| w * w * a.norm_sqr() + b.norm_sqr())
            .sum();
        0.5 * self.grid.dx() * sum / self.n() as f64
    }
}
