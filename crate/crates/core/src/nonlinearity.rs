//! Cubic nonlinearities `F(u, u_t, u_x)` and their resonance functional `K_F`.
//!
//! The general cubic term is written with ten real coefficients
//!
//! ```text
//! F = (g1 u^2 + g2 ut^2 + g3 ux^2 + g4 ut ux) u
//!   + (g5 u^2 + g6 ut^2 + g7 ux^2) ut
//!   + (g8 u^2 + g9 ut^2 + g10 ux^2) ux
//! ```
//!
//! `K_F(z)` is the Fourier coefficient of `F` evaluated on the one-periodic
//! oscillation `(cos t, -cosh z sin t, sinh z sin t)`; its real part drives
//! dissipation along the ray of rapidity `z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

/// Complex scalar used for `K_F`, profiles and extracted amplitudes.
pub type ComplexValue = Complex64;

/// Largest |z| accepted before `cosh z` cubed starts to lose meaning.
pub const Z_MAX: f64 = 300.0;

/// Default node count for the periodic quadrature of `K_F`.
pub const DEFAULT_QUADRATURE_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearityError {
    #[error("|z| = {z} exceeds the overflow guard {max}")]
    Overflow { z: f64, max: f64 },
    #[error("quadrature needs at least 8 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("coefficient gamma_{index} is not finite")]
    NonFinite { index: usize },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// The ten coefficients `gamma_1 .. gamma_10`, stored zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicNonlinearity {
    gamma: [f64; 10],
}

impl CubicNonlinearity {
    pub fn new(gamma: [f64; 10]) -> Result<Self, NonlinearityError> {
        if let Some(i) = gamma.iter().position(|g| !g.is_finite()) {
            return Err(NonlinearityError::NonFinite { index: i + 1 });
        }
        Ok(Self { gamma })
    }

    pub const fn zero() -> Self {
        Self { gamma: [0.0; 10] }
    }

    /// Sets the one-based coefficient `gamma_index`.
    pub fn with(mut self, index: usize, value: f64) -> Self {
        assert!((1..=10).contains(&index), "gamma index must be in 1..=10");
        self.gamma[index - 1] = value;
        self
    }

    pub fn gamma(&self) -> &[f64; 10] {
        &self.gamma
    }

    /// One-based accessor, `g(5)` is `gamma_5`.
    #[inline]
    pub fn g(&self, index: usize) -> f64 {
        self.gamma[index - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }

    /// Named examples of each dissipation class.
    pub fn preset(name: &str) -> Result<Self, NonlinearityError> {
        Preset::from_name(name)
            .map(Preset::nonlinearity)
            .ok_or_else(|| NonlinearityError::UnknownPreset(name.to_string()))
    }

    /// Direct evaluation of the cubic form.
    pub fn eval(&self, u: f64, ut: f64, ux: f64) -> f64 {
        let g = &self.gamma;
        (g[0] * u * u + g[1] * ut * ut + g[2] * ux * ux + g[3] * ut * ux) * u
            + (g[4] * u * u + g[5] * ut * ut + g[6] * ux * ux) * ut
            + (g[7] * u * u + g[8] * ut * ut + g[9] * ux * ux) * ux
    }

    /// Coefficients of `F` as a cubic polynomial in `ut` with `u`, `ux` frozen:
    /// `F = c0 + c1 ut + c2 ut^2 + c3 ut^3`.
    pub fn coefficients_in_ut(&self, u: f64, ux: f64) -> [f64; 4] {
        let g = &self.gamma;
        let uu = u * u;
        let xx = ux * ux;
        [
            g[0] * uu * u + g[2] * xx * u + g[7] * uu * ux + g[9] * xx * ux,
            g[4] * uu + g[6] * xx + g[3] * u * ux,
            g[1] * u + g[8] * ux,
            g[5],
        ]
    }

    /// Closed form of `K_F(z)`.
    pub fn k_closed(&self, z: f64) -> Result<ComplexValue, NonlinearityError> {
        guard(z)?;
        let g = &self.gamma;
        let (ch, sh) = (z.cosh(), z.sinh());
        let (ch2, sh2) = (ch * ch, sh * sh);
        let im = (3.0 * g[0] + g[1] * ch2 + g[2] * sh2 - g[3] * ch * sh) / 8.0;
        let re = -ch / 8.0 * (g[4] + 3.0 * g[5] * ch2 + 3.0 * g[6] * sh2)
            + sh / 8.0 * (g[7] + 3.0 * g[8] * ch2 + 3.0 * g[9] * sh2);
        Ok(ComplexValue::new(re, im))
    }

    /// Periodic trapezoid rule applied to the defining integral of `K_F`.
    ///
    /// The integrand is a trigonometric polynomial of degree 4, so any
    /// `n_nodes >= 16` reproduces the integral up to rounding.
    pub fn k_quadrature(&self, z: f64, n_nodes: usize) -> Result<ComplexValue, NonlinearityError> {
        guard(z)?;
        if n_nodes < 8 {
            return Err(NonlinearityError::TooFewNodes(n_nodes));
        }
        let (ch, sh) = (z.cosh(), z.sinh());
        let h = 2.0 * PI / n_nodes as f64;
        let mut acc = ComplexValue::new(0.0, 0.0);
        for k in 0..n_nodes {
            let theta = h * k as f64;
            let (s, c) = theta.sin_cos();
            let f = self.eval(c, -ch * s, sh * s);
            acc += f * ComplexValue::new(c, -s);
        }
        // i/(2 pi) * h * sum
        Ok(ComplexValue::i() * acc / n_nodes as f64)
    }

    /// Coefficients of `P_F(y) = 8 (1 - y^2)^{3/2} Re K_F(atanh y)`.
    pub fn p_f(&self) -> crate::classifier::CubicPoly {
        let g = |i: usize| self.g(i);
        crate::classifier::CubicPoly::new(
            -(g(5) + 3.0 * g(6)),
            g(8) + 3.0 * g(9),
            g(5) - 3.0 * g(7),
            3.0 * g(10) - g(8),
        )
    }
}

impl Default for CubicNonlinearity {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for CubicNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const MONOMIALS: [&str; 10] = [
            "u^3", "ut^2 u", "ux^2 u", "ut ux u", "u^2 ut", "ut^3", "ux^2 ut", "u^2 ux",
            "ut^2 ux", "ux^3",
        ];
        let mut first = true;
        for (g, m) in self.gamma.iter().zip(MONOMIALS) {
            if *g == 0.0 {
                continue;
            }
            if first {
                write!(f, "{g} {m}")?;
            } else if *g < 0.0 {
                write!(f, " - {} {m}", -g)?;
            } else {
                write!(f, " + {g} {m}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn guard(z: f64) -> Result<(), NonlinearityError> {
    if !(z.abs() <= Z_MAX) {
        return Err(NonlinearityError::Overflow { z, max: Z_MAX });
    }
    Ok(())
}

/// Named nonlinearities, one per dissipation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// `-u^2 ut`
    U2Ut,
    /// `-u^2 (ut + ux)`
    U2UtUx,
    /// `-(ut + ux)^3`
    UtPUx3,
    /// `-ux^2 ut`
    Ux2Ut,
    /// `-ut^3`
    Ut3,
    /// `u^3`
    U3,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::U2Ut,
        Preset::U2UtUx,
        Preset::UtPUx3,
        Preset::Ux2Ut,
        Preset::Ut3,
        Preset::U3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::U2Ut => "u2ut",
            Preset::U2UtUx => "u2utux",
            Preset::UtPUx3 => "utpux3",
            Preset::Ux2Ut => "ux2ut",
            Preset::Ut3 => "ut3",
            Preset::U3 => "u3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn nonlinearity(self) -> CubicNonlinearity {
        let z = CubicNonlinearity::zero();
        match self {
            Preset::U2Ut => z.with(5, -1.0),
            Preset::U2UtUx => z.with(5, -1.0).with(8, -1.0),
            Preset::UtPUx3 => z.with(6, -1.0).with(7, -3.0).with(9, -3.0).with(10, -1.0),
            Preset::Ux2Ut => z.with(7, -1.0),
            Preset::Ut3 => z.with(6, -1.0),
            Preset::U3 => z.with(1, 1.0),
        }
    }
}
