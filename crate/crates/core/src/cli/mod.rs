//! Command-line front end. The `kgd` binary only forwards to [`main_with_args`].

mod config;
pub mod pipeline;

pub use config::{
    AnalysisSpec, ExperimentConfig, GridSpec, NonlinearitySpec, NormSpec, OutputSpec, PValue, TauSamples, TimeSpec,
    SCHEMA_VERSION,
};

use crate::analysis::{extract_alpha, write_alpha_csv, AlphaSample, VerdictKind};
use crate::classifier::{classify, predicted_decay, ClassTag, DecayLaw, DissipationClass, NormTarget, DEFAULT_TOL};
use crate::kg_solver::{fmt_p, run_simulation, write_norms_csv, write_snapshot_csv, NormSeries, RunRecord, SolverError};
use crate::nonlinearity::{ComplexValue, CubicNonlinearity};
use crate::profile_ode::{asymptotics_deviation, integrate_profile, ProfileParams};
use clap::{Args, Parser, Subcommand};
use pipeline::{assess_all, modulation_reports, DecayAssessment, ModulationReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INSTABILITY: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "kgd", version, about = "Decay laboratory for cubic Klein-Gordon equations")]
struct Cli {
    /// JSON experiment config; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named nonlinearity, overriding the config.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the nonlinearity and print its predicted decay.
    Classify,
    /// Run the simulation and write norm and amplitude CSVs.
    Simulate,
    /// Fit decay exponents and modulation rates from a finished run.
    Fit,
    /// Integrate the amplitude equation along one ray.
    ProfileOde(ProfileArgs),
    /// Bundle classification and fits into a markdown and CSV report.
    Report,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Real part of kappa; defaults to Re K_F(z) of the nonlinearity.
    #[arg(long, allow_hyphen_values = true)]
    kappa_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_im: Option<f64>,
    /// Ray on which K_F is evaluated when kappa is not given.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    z: f64,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    beta0_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta0_im: f64,
    #[arg(long, default_value_t = 3.0)]
    tau0: f64,
    #[arg(long, default_value_t = 1e4)]
    tau_end: f64,
    /// Forcing `eps tau^{-s}`; unforced when absent.
    #[arg(long)]
    forcing_power: Option<f64>,
    /// Amplitude `eps` of the forcing.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    forcing_eps: f64,
    #[arg(long, default_value_t = 1000)]
    steps_per_decade: usize,
    /// Start of the deviation window.
    #[arg(long, default_value_t = 100.0)]
    deviation_from: f64,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Instability(String),
    Inconclusive(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Instability(_) => EXIT_INSTABILITY,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Instability(m) => write!(f, "instability: {m}"),
            CliError::Inconclusive(m) => write!(f, "inconclusive: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Validation(m) => CliError::Validation(m),
            e @ SolverError::Instability { .. } => CliError::Instability(e.to_string()),
        }
    }
}

/// Parses arguments, runs one command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("kgd: {e}");
            e.exit_code()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KGD_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Validation(format!("KGD_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(CliError::Validation)?,
        None => match &cli.out {
            // `fit` and `report` pick up the config a previous `simulate` left behind
            Some(dir) if dir.join("config.json").is_file() && !matches!(cli.command, Command::Simulate) => {
                ExperimentConfig::load(&dir.join("config.json")).map_err(CliError::Validation)?
            }
            _ => ExperimentConfig::default(),
        },
    };
    if let Some(p) = &cli.preset {
        config.nonlinearity = NonlinearitySpec::Preset(p.clone());
    }
    if let Some(o) = &cli.out {
        config.outputs.directory = o.to_string_lossy().into_owned();
    }
    let pool = thread_pool()?;
    pool.install(|| match &cli.command {
        Command::Classify => cmd_classify(&config, cli.out.is_some()),
        Command::Simulate => cmd_simulate(&config),
        Command::Fit => cmd_fit(&config).map(|_| ()),
        Command::ProfileOde(args) => cmd_profile_ode(&config, args),
        Command::Report => cmd_report(&config),
    })
}

fn out_dir(config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(&config.outputs.directory);
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateRow {
    pub target: NormTarget,
    pub p: PValue,
    pub a: f64,
    pub q: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub nonlinearity: String,
    pub gamma: [f64; 10],
    pub p_f: [f64; 4],
    /// `(z, Re K_F, Im K_F)` on a fixed grid.
    pub k_f: Vec<(f64, f64, f64)>,
    pub class: DissipationClass,
    pub decay: Vec<RateRow>,
}

pub const REPORT_PS: [f64; 3] = [2.0, 4.0, f64::INFINITY];

pub fn classification(config: &ExperimentConfig) -> Result<Classification, CliError> {
    let nl = config.nonlinearity.resolve().map_err(CliError::Validation)?;
    let p_f = nl.p_f();
    let class = classify(&p_f, DEFAULT_TOL).map_err(|e| CliError::Validation(e.to_string()))?;
    let k_f = (-6..=6)
        .map(|k| {
            let z = 0.5 * k as f64;
            let v = nl.k_closed(z).expect("|z| <= 3 is in range");
            (z, v.re, v.im)
        })
        .collect();
    let mut decay = Vec::new();
    if let Ok(law) = predicted_decay(&class) {
        for target in NormTarget::ALL {
            for p in REPORT_PS {
                let e = law.exponents(target, p).expect("p >= 2");
                decay.push(RateRow { target, p: PValue::from_f64(p), a: e.a, q: e.q, r: e.r });
            }
        }
    }
    Ok(Classification {
        nonlinearity: format!("{} ({})", config.nonlinearity.label(), nl),
        gamma: *nl.gamma(),
        p_f: p_f.coeffs(),
        k_f,
        class,
        decay,
    })
}

fn classification_text(c: &Classification) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nonlinearity: {}", c.nonlinearity);
    // adding zero folds -0 into 0 for display
    let [p0, p1, p2, p3] = c.p_f.map(|v| v + 0.0);
    let _ = writeln!(s, "P_F(y) = {p0} + {p1} y + {p2} y^2 + {p3} y^3");
    let _ = writeln!(s, "K_F(z):");
    for (z, re, im) in &c.k_f {
        let _ = writeln!(s, "  z = {z:>5.2}   Re = {re:>12.6e}   Im = {im:>12.6e}");
    }
    let _ = writeln!(s, "class: {}", c.class.tag);
    for (j, cj) in c.class.constants.iter().enumerate() {
        if let Some(v) = cj {
            let _ = writeln!(s, "  C_{j} = {v}");
        }
    }
    if let (Some(y0), Some(z0)) = (c.class.y0, c.class.z0) {
        let _ = writeln!(s, "  degenerate point y0 = {}, z0 = {}", y0 + 0.0, z0 + 0.0);
    }
    if c.class.tag == ClassTag::NotDissipative {
        if let (Some(y), Some(m)) = (c.class.min_point, c.class.min_value) {
            let _ = writeln!(s, "  P_F({y}) = {m} < 0");
        }
    }
    if !c.decay.is_empty() {
        let _ = writeln!(s, "predicted decay  norm <~ (1+t)^-a (log(2+t))^-q (log(1+log(2+t)))^r:");
        for row in &c.decay {
            let _ = writeln!(
                s,
                "  {:<3} p = {:<4} a = {:.4}  q = {:.4}  r = {:.4}",
                row.target.name(),
                fmt_p(row.p.value()),
                row.a,
                row.q,
                row.r
            );
        }
    }
    s
}

fn cmd_classify(config: &ExperimentConfig, write: bool) -> Result<(), CliError> {
    let c = classification(config)?;
    print!("{}", classification_text(&c));
    if write {
        let dir = out_dir(config)?;
        write_file(&dir.join("classification.json"), &(serde_json::to_string_pretty(&c).unwrap() + "\n"))?;
    }
    Ok(())
}

/// Writes everything a finished run produces into `dir`.
pub fn write_run(dir: &Path, config: &ExperimentConfig, run: &RunRecord) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    write_file(&dir.join("config.json"), &(config.to_json() + "\n"))?;
    let mut w = BufWriter::new(fs::File::create(dir.join("norms.csv"))?);
    write_norms_csv(&mut w, &run.norms)?;
    w.flush()?;

    let taus = config.analysis.tau_samples.values();
    let samples = alpha_samples(config, run, &taus)?;
    if !samples.is_empty() {
        let mut w = BufWriter::new(fs::File::create(dir.join("alpha.csv"))?);
        write_alpha_csv(&mut w, &samples)?;
        w.flush()?;
    }

    if let Some(stride) = config.time.record_stride {
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        for snap in &run.snapshots {
            let k = (snap.t / stride).round();
            if (k * stride - snap.t).abs() > 1e-9 {
                continue;
            }
            let mut w = BufWriter::new(fs::File::create(snap_dir.join(format!("snapshot_{:06}.csv", k as u64)))?);
            write_snapshot_csv(&mut w, &run.grid, snap)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Amplitude samples at every configured `(tau, z)` that the run covers.
pub fn alpha_samples(config: &ExperimentConfig, run: &RunRecord, taus: &[f64]) -> Result<Vec<AlphaSample>, CliError> {
    let mut out = Vec::new();
    for &z in &config.analysis.z_samples {
        let inside: Vec<f64> = taus
            .iter()
            .copied()
            .filter(|tau| {
                let t = tau * z.cosh() - 2.0 * config.b;
                (0.0..=config.time.t_final).contains(&t)
            })
            .collect();
        let s = extract_alpha(run, &[z], &inside, config.b).map_err(|e| CliError::Validation(e.to_string()))?;
        out.extend(s);
    }
    Ok(out)
}

fn cmd_simulate(config: &ExperimentConfig) -> Result<(), CliError> {
    config.validate().map_err(CliError::Validation)?;
    let nl = config.nonlinearity.resolve().map_err(CliError::Validation)?;
    let grid = config.grid().map_err(CliError::Validation)?;
    let dir = out_dir(config)?;
    if config.sweep_eps.is_empty() {
        let run = run_simulation(&config.solver_config(config.eps), &nl, &grid)?;
        write_run(&dir, config, &run)?;
        eprintln!("kgd: wrote {}", dir.display());
        return Ok(());
    }
    let mut amplitudes = vec![config.eps];
    amplitudes.extend(config.sweep_eps.iter().copied());
    let results: Vec<Result<(), CliError>> = amplitudes
        .par_iter()
        .map(|&eps| {
            let mut c = config.clone();
            c.eps = eps;
            c.sweep_eps.clear();
            let sub = dir.join(format!("eps_{eps}"));
            c.outputs.directory = sub.to_string_lossy().into_owned();
            let run = run_simulation(&c.solver_config(eps), &nl, &grid)?;
            write_run(&sub, &c, &run)
        })
        .collect();
    results.into_iter().collect::<Result<Vec<()>, _>>()?;
    eprintln!("kgd: wrote {} runs under {}", amplitudes.len(), dir.display());
    Ok(())
}

pub fn read_norms_csv(text: &str) -> Result<NormSeries, String> {
    let mut lines = text.lines();
    if lines.next() != Some("t,p,field,norm") {
        return Err("norms.csv must start with the header t,p,field,norm".into());
    }
    let mut series = NormSeries::default();
    for (n, line) in lines.enumerate() {
        let bad = || format!("norms.csv line {}: {line:?}", n + 2);
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(bad());
        }
        let t: f64 = cols[0].parse().map_err(|_| bad())?;
        let p: f64 = if cols[1] == "inf" { f64::INFINITY } else { cols[1].parse().map_err(|_| bad())? };
        let v: f64 = cols[3].parse().map_err(|_| bad())?;
        let i = match series.p_index(p) {
            Some(i) => i,
            None => {
                series.ps.push(p);
                series.u.push(Vec::new());
                series.ut.push(Vec::new());
                series.ux.push(Vec::new());
                series.ps.len() - 1
            }
        };
        let dest = match cols[2] {
            "u" => &mut series.u[i],
            "ut" => &mut series.ut[i],
            "ux" => &mut series.ux[i],
            "du" => continue,
            _ => return Err(bad()),
        };
        dest.push(v);
        if i == 0 && cols[2] == "u" {
            series.times.push(t);
        }
    }
    let n = series.times.len();
    let complete = series.u.iter().chain(&series.ut).chain(&series.ux).all(|s| s.len() == n);
    if !complete {
        return Err("norms.csv has series of unequal length".into());
    }
    Ok(series)
}

pub fn read_alpha_csv(text: &str) -> Result<Vec<AlphaSample>, String> {
    let mut lines = text.lines();
    if lines.next() != Some("tau,z,re_alpha,im_alpha") {
        return Err("alpha.csv must start with the header tau,z,re_alpha,im_alpha".into());
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let v: Vec<f64> = line.split(',').map(|c| c.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| format!("alpha.csv line {}", n + 2))?;
            if v.len() != 4 {
                return Err(format!("alpha.csv line {}", n + 2));
            }
            Ok(AlphaSample { tau: v[0], z: v[1], alpha: ComplexValue::new(v[2], v[3]) })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub nonlinearity: String,
    pub class: ClassTag,
    pub eps: f64,
    pub decay: Vec<DecayAssessment>,
    pub modulation: Vec<ModulationReport>,
}

fn cmd_fit(config: &ExperimentConfig) -> Result<FitReport, CliError> {
    let dir = PathBuf::from(&config.outputs.directory);
    let norms_path = dir.join("norms.csv");
    let text = fs::read_to_string(&norms_path)
        .map_err(|e| CliError::Validation(format!("{}: {e}; run `kgd simulate` first", norms_path.display())))?;
    let norms = read_norms_csv(&text).map_err(CliError::Validation)?;
    let c = classification(config)?;
    let law = predicted_decay(&c.class).map_err(|e| CliError::Validation(e.to_string()))?;
    let nl = config.nonlinearity.resolve().map_err(CliError::Validation)?;

    let decay = assess_all(&norms, &law, config.analysis.fit_window, config.analysis.smoothing_width);
    let modulation = match fs::read_to_string(dir.join("alpha.csv")) {
        Ok(t) => modulation_reports(&read_alpha_csv(&t).map_err(CliError::Validation)?, &nl),
        Err(_) => Vec::new(),
    };
    let report = FitReport { nonlinearity: c.nonlinearity, class: c.class.tag, eps: config.eps, decay, modulation };
    write_file(&dir.join("fits.json"), &(serde_json::to_string_pretty(&report).unwrap() + "\n"))?;
    for a in &report.decay {
        println!(
            "{:<3} p = {:<4} q_pred = {:.3}  q_fit = {:>7.3}  {:?}  monotone: {}{}",
            a.target.name(),
            fmt_p(a.p),
            a.verdict.q_predicted,
            a.verdict.q_fit,
            a.verdict.kind,
            a.monotone.holds,
            if a.enhanced { "" } else { " (not enhanced)" }
        );
    }
    for m in &report.modulation {
        match &m.fit {
            Some(f) => println!("z = {}: Re kappa fit {:.4} vs K_F {:.4}", m.z, f.kappa_re, m.kappa_predicted),
            None => println!("z = {}: {}", m.z, m.note),
        }
    }
    if !report.decay.is_empty() && report.decay.iter().all(|a| a.verdict.kind == VerdictKind::Inconclusive) {
        return Err(CliError::Inconclusive("every decay fit is inconclusive".into()));
    }
    Ok(report)
}

fn forcing_power(eps: f64, s: f64) -> impl Fn(f64) -> ComplexValue {
    move |tau: f64| ComplexValue::new(eps * tau.powf(-s), 0.0)
}

fn cmd_profile_ode(config: &ExperimentConfig, args: &ProfileArgs) -> Result<(), CliError> {
    let kappa = match (args.kappa_re, args.kappa_im) {
        (None, None) => {
            let nl: CubicNonlinearity = config.nonlinearity.resolve().map_err(CliError::Validation)?;
            nl.k_closed(args.z).map_err(|e| CliError::Validation(e.to_string()))?
        }
        (re, im) => ComplexValue::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
    };
    let params = ProfileParams::new(kappa, ComplexValue::new(args.beta0_re, args.beta0_im), args.tau0)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let f = args.forcing_power.map(|s| forcing_power(args.forcing_eps, s));
    let forcing = f.as_ref().map(|f| f as &dyn Fn(f64) -> ComplexValue);
    let traj = integrate_profile(&params, forcing, args.tau_end, args.steps_per_decade)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let dir = out_dir(config)?;
    let mut w = BufWriter::new(fs::File::create(dir.join("trajectory.csv"))?);
    writeln!(w, "tau,re_beta,im_beta,abs_beta")?;
    for (t, b) in traj.taus.iter().zip(&traj.betas) {
        writeln!(w, "{},{},{},{}", t, b.re, b.im, b.norm())?;
    }
    w.flush()?;
    if args.deviation_from < args.tau_end {
        let dev = asymptotics_deviation(&params, forcing, (args.deviation_from, args.tau_end), args.steps_per_decade)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let summary = serde_json::json!({
            "kappa": [kappa.re, kappa.im],
            "beta_inf": [dev.beta_inf.re, dev.beta_inf.im],
            "max_scaled_deviation": dev.max,
            "first_decade_mean": dev.mean_over(args.deviation_from, 10.0 * args.deviation_from),
            "last_decade_mean": dev.mean_over(args.tau_end / 10.0, f64::INFINITY),
        });
        write_file(&dir.join("deviation.json"), &(serde_json::to_string_pretty(&summary).unwrap() + "\n"))?;
        println!("beta_inf = {:.6} {:+.6}i, max scaled deviation {:.3e}", dev.beta_inf.re, dev.beta_inf.im, dev.max);
    }
    if let Some((t, b)) = traj.last() {
        println!("beta({t}) = {:.6} {:+.6}i", b.re, b.im);
    }
    Ok(())
}

fn verdict_name(k: VerdictKind) -> &'static str {
    match k {
        VerdictKind::Consistent => "consistent",
        VerdictKind::Inconsistent => "inconsistent",
        VerdictKind::Inconclusive => "inconclusive",
    }
}

fn cmd_report(config: &ExperimentConfig) -> Result<(), CliError> {
    let dir = PathBuf::from(&config.outputs.directory);
    let fits: FitReport = match fs::read_to_string(dir.join("fits.json")) {
        Ok(t) => serde_json::from_str(&t).map_err(|e| CliError::Validation(format!("fits.json: {e}")))?,
        Err(_) => match cmd_fit(config) {
            Ok(r) => r,
            Err(CliError::Inconclusive(_)) => {
                serde_json::from_str(&fs::read_to_string(dir.join("fits.json"))?).map_err(|e| CliError::Io(e.to_string()))?
            }
            Err(e) => return Err(e),
        },
    };
    let c = classification(config)?;
    let law = DecayLaw { class: c.class.tag };

    let mut md = String::new();
    let _ = writeln!(md, "# Decay report: {}\n", c.nonlinearity);
    let _ = writeln!(md, "Class **{}**, eps = {}.\n", c.class.tag, fits.eps);
    let _ = writeln!(md, "| norm | p | enhanced | q predicted | q fit | r fit | monotone | verdict |");
    let _ = writeln!(md, "|---|---|---|---|---|---|---|---|");
    let mut csv = String::from("nonlinearity,class,target,p,enhanced,q_predicted,q_fit,r_fit,residual,monotone,verdict\n");
    for a in &fits.decay {
        let r_fit = a.fit.as_ref().and_then(|f| f.r_fit).map_or(String::from("-"), |r| format!("{r:.3}"));
        let residual = a.fit.as_ref().map_or(f64::NAN, |f| f.residual);
        let _ = writeln!(
            md,
            "| {} | {} | {} | {:.3} | {:.3} | {} | {} | {} |",
            a.target.name(),
            fmt_p(a.p),
            a.enhanced,
            a.verdict.q_predicted,
            a.verdict.q_fit,
            r_fit,
            a.monotone.holds,
            verdict_name(a.verdict.kind)
        );
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            config.nonlinearity.label(),
            c.class.tag,
            a.target.name(),
            fmt_p(a.p),
            law.enhances(a.target, a.p),
            a.verdict.q_predicted,
            a.verdict.q_fit,
            r_fit,
            residual,
            a.monotone.holds,
            verdict_name(a.verdict.kind)
        );
    }
    let _ = writeln!(md);
    for a in fits.decay.iter().filter(|a| a.verdict.kind != VerdictKind::Consistent) {
        let _ = writeln!(md, "- {} p={}: {}", a.target.name(), fmt_p(a.p), a.verdict.diagnosis);
    }
    if !fits.modulation.is_empty() {
        let _ = writeln!(md, "\n## Modulation\n\n| z | Re kappa fit | Re K_F | R^2 |\n|---|---|---|---|");
        for m in &fits.modulation {
            match &m.fit {
                Some(f) => {
                    let _ = writeln!(md, "| {} | {:.4} | {:.4} | {:.4} |", m.z, f.kappa_re, m.kappa_predicted, f.r_squared);
                }
                None => {
                    let _ = writeln!(md, "| {} | - | {:.4} | {} |", m.z, m.kappa_predicted, m.note);
                }
            }
        }
    }
    write_file(&dir.join("report.md"), &md)?;
    write_file(&dir.join("report.csv"), &csv)?;
    print!("{md}");
    Ok(())
}
