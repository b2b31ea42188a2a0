use crate::kg_solver::{DataShape, Grid1D, Scheme, SolverConfig};
use crate::nonlinearity::CubicNonlinearity;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// A norm exponent: a number `>= 2` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Finite(f64),
    Named(Inf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inf {
    Inf,
}

impl PValue {
    pub fn value(self) -> f64 {
        match self {
            PValue::Finite(p) => p,
            PValue::Named(Inf::Inf) => f64::INFINITY,
        }
    }

    pub fn from_f64(p: f64) -> Self {
        if p.is_infinite() {
            PValue::Named(Inf::Inf)
        } else {
            PValue::Finite(p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NonlinearitySpec {
    Preset(String),
    Gamma { gamma: [f64; 10] },
}

impl NonlinearitySpec {
    pub fn resolve(&self) -> Result<CubicNonlinearity, String> {
        match self {
            NonlinearitySpec::Preset(name) => CubicNonlinearity::preset(name).map_err(|e| e.to_string()),
            NonlinearitySpec::Gamma { gamma } => CubicNonlinearity::new(*gamma).map_err(|e| e.to_string()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NonlinearitySpec::Preset(name) => name.clone(),
            NonlinearitySpec::Gamma { .. } => "custom".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_length: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_final: f64,
    /// Spacing of dumped snapshot files; none when absent.
    #[serde(default)]
    pub record_stride: Option<f64>,
    /// Spacing of the norm time series.
    pub norm_interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub p: Vec<PValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSamples {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl TauSamples {
    /// Geometric spacing from `lo` to `hi`, inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![self.lo];
        }
        let r = self.hi / self.lo;
        (0..self.count).map(|k| self.lo * r.powf(k as f64 / (self.count - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub z_samples: Vec<f64>,
    pub tau_samples: TauSamples,
    /// `[t_min, t_max]` for decay fits.
    pub fit_window: [f64; 2],
    /// Moving-average width applied to norms before fitting.
    pub smoothing_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub directory: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub nonlinearity: NonlinearitySpec,
    pub eps: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_shape")]
    pub shape: DataShape,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub norms: NormSpec,
    pub analysis: AnalysisSpec,
    pub outputs: OutputSpec,
    /// Extra amplitudes to run alongside `eps`, each in its own directory.
    #[serde(default)]
    pub sweep_eps: Vec<f64>,
}

fn default_scheme() -> Scheme {
    Scheme::StrangSplit
}

fn default_shape() -> DataShape {
    DataShape::Bump
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            nonlinearity: NonlinearitySpec::Preset("ut3".into()),
            eps: 0.1,
            b: 6.0,
            scheme: Scheme::StrangSplit,
            shape: DataShape::Bump,
            grid: GridSpec { half_length: 1100.0, n_points: 8192 },
            time: TimeSpec { dt: 0.02, t_final: 1000.0, record_stride: None, norm_interval: 0.25 },
            norms: NormSpec { p: vec![PValue::Finite(2.0), PValue::Finite(4.0), PValue::Named(Inf::Inf)] },
            analysis: AnalysisSpec {
                z_samples: vec![0.0],
                tau_samples: TauSamples { lo: 100.0, hi: 1000.0, count: 40 },
                fit_window: [100.0, 1000.0],
                smoothing_width: 2.0 * std::f64::consts::PI,
            },
            outputs: OutputSpec { directory: "kgd-out".into() },
            sweep_eps: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
        match v.get("schema_version").and_then(|s| s.as_u64()) {
            Some(x) if x == SCHEMA_VERSION as u64 => {}
            Some(x) => return Err(format!("unsupported schema_version {x}, expected {SCHEMA_VERSION}")),
            None => return Err("config lacks an integer schema_version".into()),
        }
        serde_json::from_value(v).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<Grid1D, String> {
        Grid1D::new(self.grid.half_length, self.grid.n_points).map_err(|e| e.to_string())
    }

    pub fn ps(&self) -> Vec<f64> {
        self.norms.p.iter().map(|p| p.value()).collect()
    }

    /// Snapshot times needed for amplitude extraction, plus the dump stride.
    pub fn record_times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &z in &self.analysis.z_samples {
            for tau in self.analysis.tau_samples.values() {
                let t = tau * f64::cosh(z) - 2.0 * self.b;
                if (0.0..=self.time.t_final).contains(&t) {
                    out.push(t);
                }
            }
        }
        if let Some(stride) = self.time.record_stride {
            let n = (self.time.t_final / stride + 1e-9).floor() as usize;
            out.extend((0..=n).map(|k| k as f64 * stride));
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        out
    }

    pub fn solver_config(&self, eps: f64) -> SolverConfig {
        SolverConfig {
            eps,
            b: self.b,
            dt: self.time.dt,
            t_final: self.time.t_final,
            scheme: self.scheme,
            record_times: self.record_times(),
            norm_interval: self.time.norm_interval,
            norm_ps: self.ps(),
            shape: self.shape,
        }
    }

    /// Checks everything a run depends on before any work starts.
    pub fn validate(&self) -> Result<(), String> {
        self.nonlinearity.resolve()?;
        let grid = self.grid()?;
        self.solver_config(self.eps).validate(&grid).map_err(|e| e.to_string())?;
        for &e in &self.sweep_eps {
            self.solver_config(e).validate(&grid).map_err(|e| e.to_string())?;
        }
        if let Some(s) = self.time.record_stride {
            if !(s > 0.0) {
                return Err(format!("record_stride must be positive, got {s}"));
            }
        }
        let ts = &self.analysis.tau_samples;
        if !(ts.lo > 0.0 && ts.hi >= ts.lo && ts.count >= 1) {
            return Err("tau_samples needs 0 < lo <= hi and count >= 1".into());
        }
        let [lo, hi] = self.analysis.fit_window;
        if !(lo < hi) {
            return Err(format!("fit_window [{lo}, {hi}] is empty"));
        }
        if !(self.analysis.smoothing_width >= 0.0) {
            return Err("smoothing_width must be non-negative".into());
        }
        Ok(())
    }
}
