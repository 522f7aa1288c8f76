//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::asymptotic::{
    k_inf_directional, k_inf_directional_q1, k_inf_worst, k_inf_worst_q1, osf_worst, ot_bounds, ot_worst,
    q1_build, q1_build_semisimple, Q1Operator,
};
use crate::condition::{characteristic_time, error_curves, k_directional, k_worst, uniform_grid, ConditionCurve, Perturbation};
use crate::error::{Error, Result};
use crate::experiments::{
    census_v1w1, fj_maxima_study, gdpnd_componentwise_study, general_componentwise_study, ratio_r_study,
    GdpndConfig, GeneralComponentsConfig, RatioConfig, RightmostFilter, RngSpec, Sampler, StatSummary,
    DEFAULT_SEED,
};
use crate::linalg::{eig_full, CMatrix, CVector, EigenDecomposition, NormKind};
use crate::models::{jordan_q1, jordan_rlge_margin, preset, preset_names, run_scenario, Flow, JordanStructure};
use crate::onset::{eps_curves, measured_onset, onset_report, onset_time, overlap_v, overlap_w};
use crate::spectrum::{all_modes, partition_spectrum, rightmost_data, rlge_check, LevelKind, ModeKind, LEVEL_TOL, RLGE_TOL};

/// Eigenvector-matrix condition above which a repeated rightmost eigenvalue
/// is not treated as semisimple.
const SEMISIMPLE_COND_MAX: f64 = 1e6;

#[derive(Debug, Parser)]
#[command(name = "relcond", version, about = "Relative-error conditioning of y' = Ay")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Direct and asymptotic condition numbers on a time grid.
    Analyze(ProblemArgs),
    /// Onset-of-asymptotics bound and measured onset.
    Onset(ProblemArgs),
    /// V1/W1 census of random matrices with a rightmost conjugate pair.
    Census(CensusArgs),
    /// Ratio of the maxima of K and K_inf over random instances.
    Ratio(RatioArgs),
    /// Componentwise-versus-normwise ratio studies.
    Components(ComponentsArgs),
    /// Maxima of log f_j and log(f_j/f_1) over random instances.
    Fjmax(FjArgs),
    /// Preset scenarios.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelAction {
    List,
    Run { name: String },
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Matrix file: one row per line, real or a+bi entries.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated values or a single-column file.
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<String>,
    #[arg(long = "y0-tilde", allow_hyphen_values = true)]
    pub y0_tilde: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    /// 1, 2, inf or mean-p:P.
    #[arg(long)]
    pub norm: Option<String>,
    /// Horizon in characteristic times.
    #[arg(long = "tmax-chars")]
    pub tmax_chars: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Target precision for the onset analysis.
    #[arg(long, default_value_t = 0.1)]
    pub precision: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    #[arg(long, env = "RELCOND_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 5000)]
    pub trials: usize,
    /// Comma-separated V1 thresholds; empty for none.
    #[arg(long, default_value = "0.9,0.99,0.999,0.9999")]
    pub thresholds: String,
    #[command(flatten)]
    pub common: SeedArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RatioArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value = "2")]
    pub norm: String,
    /// gaussian, qut or symmetric.
    #[arg(long, default_value = "gaussian")]
    pub sampler: String,
    /// any, real or complex rightmost level.
    #[arg(long, default_value = "any")]
    pub filter: String,
    #[arg(long = "tmax-chars", default_value_t = 50.0)]
    pub tmax_chars: f64,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[command(flatten)]
    pub common: SeedArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ComponentsArgs {
    /// gdpnd or general.
    #[arg(long, default_value = "gdpnd")]
    pub kind: String,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    /// Dimension of the general study.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Coefficient interval of the gdpnd study.
    #[arg(long = "coef-lo", default_value_t = 0.01)]
    pub coef_lo: f64,
    #[arg(long = "coef-hi", default_value_t = 0.10)]
    pub coef_hi: f64,
    #[command(flatten)]
    pub common: SeedArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FjArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value = "gaussian")]
    pub sampler: String,
    #[command(flatten)]
    pub common: SeedArgs,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) => 2,
        Error::Unsupported(_) | Error::UnsupportedNorm(_) => 3,
        Error::Rlge { .. } => 4,
        Error::Range(_) => 5,
    }
}

/// Parse arguments and run; output goes to `--out` or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Input(e.to_string()))?;
    execute(cli, stdout)
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => {
            let out = a.out.clone();
            emit(&cmd_analyze(&a)?, out.as_deref(), stdout)
        }
        Command::Onset(a) => {
            let (report, table) = cmd_onset(&a)?;
            if let Some(p) = &a.out {
                emit(&table, Some(p), stdout)?;
            }
            write_text(stdout, &report)
        }
        Command::Census(a) => emit(&cmd_census(&a)?, a.common.out.as_deref(), stdout),
        Command::Ratio(a) => emit(&cmd_ratio(&a)?, a.common.out.as_deref(), stdout),
        Command::Components(a) => emit(&cmd_components(&a)?, a.common.out.as_deref(), stdout),
        Command::Fjmax(a) => emit(&cmd_fjmax(&a)?, a.common.out.as_deref(), stdout),
        Command::Model { action: ModelAction::List } => {
            let mut s = String::new();
            for name in preset_names() {
                let sc = preset(name)?;
                s.push_str(&format!("{name}\t{}\n", sc.description));
            }
            write_text(stdout, &s)
        }
        Command::Model { action: ModelAction::Run { name } } => write_text(stdout, &cmd_model_run(&name)?),
    }
}

fn write_text(w: &mut dyn Write, s: &str) -> Result<()> {
    w.write_all(s.as_bytes()).map_err(|e| Error::Input(format!("cannot write output: {e}")))
}

/// A CSV table with `#` metadata lines before and after.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub footer: Vec<String>,
}

impl Table {
    fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push(format!("{key}: {value}"));
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for m in &self.meta {
            s.push_str(&format!("# {m}\n"));
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.map(fmt_float).unwrap_or_default()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for m in &self.footer {
            s.push_str(&format!("# {m}\n"));
        }
        s
    }
}

/// Seventeen significant digits; parses back to the same bits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Read a CSV written by [`Table::to_csv`]; empty cells become `None`.
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut t = Table::default();
    let mut seen_header = false;
    for line in text.lines() {
        if let Some(m) = line.strip_prefix('#') {
            let m = m.trim().to_string();
            if seen_header {
                t.footer.push(m);
            } else {
                t.meta.push(m);
            }
        } else if !seen_header {
            t.header = line.split(',').map(str::to_string).collect();
            seen_header = true;
        } else if !line.is_empty() {
            let row = line
                .split(',')
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>().map(Some).map_err(|_| Error::Input(format!("bad CSV cell '{c}'")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            t.rows.push(row);
        }
    }
    Ok(t)
}

fn emit(t: &Table, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, t.to_csv()).map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => write_text(stdout, &t.to_csv()),
    }
}

/// `1`, `2`, `inf` or `mean-p:P`.
pub fn parse_norm(s: &str) -> Result<NormKind> {
    let k = match s.trim() {
        "1" => NormKind::P1,
        "2" => NormKind::P2,
        "inf" | "Inf" | "INF" => NormKind::PInf,
        other => {
            let p = other
                .strip_prefix("mean-p:")
                .ok_or_else(|| Error::Input(format!("unknown norm '{s}' (1, 2, inf, mean-p:P)")))?;
            let p = if p == "inf" { f64::INFINITY } else { p.parse().map_err(|_| Error::Input(format!("bad exponent in '{s}'")))? };
            NormKind::MeanP(p)
        }
    };
    k.validate().map_err(|_| Error::Input(format!("invalid norm '{s}'")))
}

/// A real literal, or `a+bi`, `a-bi`, `bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Input(format!("bad number '{s}'"));
    let s = s.trim();
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn split_entries(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Square matrix from text.
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .map(strip_comment)
        .filter(|l| !l.trim().is_empty())
        .map(|l| split_entries(l).map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input(format!("matrix must be square; got {n} rows of unequal or different length")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Vector from a comma-separated list or a single-column file.
pub fn parse_vector(spec: &str) -> Result<CVector> {
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).map_err(|e| Error::Input(format!("cannot read {spec}: {e}")))?
    } else {
        spec.to_string()
    };
    let vals = text
        .lines()
        .map(strip_comment)
        .flat_map(split_entries)
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    if vals.is_empty() {
        return Err(Error::Input("empty vector".into()));
    }
    Ok(CVector::from_vec(vals))
}

/// A resolved analysis problem.
struct Problem {
    source: String,
    flow: Flow,
    dec: Option<EigenDecomposition>,
    jordan: Option<JordanStructure>,
    y0: CVector,
    y0_tilde: Option<CVector>,
    z0: Option<CVector>,
    norm: NormKind,
    t_hat: f64,
    times: Vec<f64>,
}

fn resolve(a: &ProblemArgs) -> Result<Problem> {
    let y0_arg = a.y0.as_deref().map(parse_vector).transpose()?;
    let yt_arg = a.y0_tilde.as_deref().map(parse_vector).transpose()?;
    let z0_arg = a.z0.as_deref().map(parse_vector).transpose()?;
    let norm_arg = a.norm.as_deref().map(parse_norm).transpose()?;
    if a.points < 2 {
        return Err(Error::Input("need at least two grid points".into()));
    }
    let p = match (&a.matrix, &a.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
            let m = parse_matrix(&text)?;
            let y0 = y0_arg.ok_or_else(|| Error::Input("--y0 is required with --matrix".into()))?;
            let dec = eig_full(&m)?;
            let t_hat = characteristic_time(&dec);
            let horizon = a.tmax_chars.unwrap_or(50.0) * t_hat;
            Problem {
                source: format!("matrix {}", path.display()),
                flow: Flow::Dense(m),
                dec: Some(dec),
                jordan: None,
                y0,
                y0_tilde: yt_arg,
                z0: z0_arg,
                norm: norm_arg.unwrap_or(NormKind::P2),
                t_hat,
                times: uniform_grid(0.0, horizon, a.points),
            }
        }
        (None, Some(name)) => {
            let s = preset(name)?;
            let override_y0 = y0_arg.is_some();
            let y0 = y0_arg.unwrap_or_else(|| crate::linalg::to_complex_vec(&s.y0[0]));
            let y0_tilde = yt_arg.or_else(|| if override_y0 { None } else { s.y0_tilde.as_ref().map(crate::linalg::to_complex_vec) });
            let z0 = z0_arg.or_else(|| if override_y0 { None } else { s.z0.as_ref().map(crate::linalg::to_complex_vec) });
            let dec = if s.jordan.is_some() { None } else { Some(s.decomposition()?) };
            let horizon = a.tmax_chars.map_or(s.horizon, |c| c * s.t_hat);
            Problem {
                source: format!("preset {name}"),
                flow: s.flow(),
                dec,
                jordan: s.jordan.clone(),
                y0,
                y0_tilde,
                z0,
                norm: norm_arg.unwrap_or(s.norm),
                t_hat: s.t_hat,
                times: uniform_grid(0.0, horizon, a.points),
            }
        }
        _ => return Err(Error::Input("give exactly one of --matrix and --preset".into())),
    };
    let n = crate::linalg::Evolution::dim(&p.flow);
    for (name, v) in [("y0", Some(&p.y0)), ("y0-tilde", p.y0_tilde.as_ref()), ("z0", p.z0.as_ref())] {
        if let Some(v) = v {
            if v.len() != n {
                return Err(Error::Input(format!("--{name} has length {}, matrix has order {n}", v.len())));
            }
        }
    }
    Ok(p)
}

/// How the asymptotic curves were obtained.
enum Limit {
    /// Generic rightmost level of a real matrix: rightmost data.
    Mode(Box<crate::spectrum::ModeData>),
    /// Leading operator: complex matrices, semisimple repeats, Jordan bases.
    Operator(Q1Operator, &'static str),
}

fn limit_for(p: &Problem) -> Result<(Limit, f64)> {
    if let Some(js) = &p.jordan {
        let margin = jordan_rlge_margin(js, &p.y0, p.norm, RLGE_TOL)?;
        return Ok((Limit::Operator(jordan_q1(js)?, "jordan"), margin));
    }
    let dec = p.dec.as_ref().expect("decomposition present without a Jordan basis");
    let part = partition_spectrum(dec, LEVEL_TOL);
    if part.rightmost().kind == LevelKind::NonGeneric {
        if !dec.trustworthy || dec.cond_v > SEMISIMPLE_COND_MAX {
            return Err(Error::Unsupported(
                "rightmost eigenvalue is repeated or defective; supply a Jordan basis".into(),
            ));
        }
        let op = q1_build_semisimple(dec, &part);
        return Ok((Limit::Operator(op, "semisimple"), f64::NAN));
    }
    let rm = rightmost_data(dec, &part, p.norm)?;
    let margin = rlge_check(&rm, &p.y0, RLGE_TOL)?;
    if dec.is_real {
        Ok((Limit::Mode(Box::new(rm)), margin))
    } else {
        Ok((Limit::Operator(q1_build(dec, &part)?, "q1"), margin))
    }
}

fn col(c: &ConditionCurve) -> Vec<Option<f64>> {
    c.values.iter().map(|&x| Some(x)).collect()
}

pub fn cmd_analyze(a: &ProblemArgs) -> Result<Table> {
    let p = resolve(a)?;
    let (limit, margin) = limit_for(&p)?;
    let times = &p.times;
    let z = match (&p.z0, &p.y0_tilde) {
        (Some(z), _) => Some(z.clone()),
        (None, Some(yt)) => Some(Perturbation::new(p.y0.clone(), yt.clone(), p.norm)?.z0_hat),
        _ => None,
    };
    let mut t = Table::default();
    t.meta("command", "analyze");
    t.meta("source", &p.source);
    t.meta("n", crate::linalg::Evolution::dim(&p.flow));
    t.meta("norm", p.norm);
    t.meta("t_hat", fmt_float(p.t_hat));
    t.meta("horizon", fmt_float(*times.last().unwrap()));
    t.meta("points", times.len());
    if margin.is_finite() {
        t.meta("rlge_margin", fmt_float(margin));
    }

    let mut header = vec!["t".to_string(), "K_direct".into()];
    let mut cols: Vec<Vec<Option<f64>>> = vec![times.iter().map(|&x| Some(x)).collect()];
    cols.push(col(&k_worst(&p.flow, &p.y0, p.norm, times)?));
    if let Some(z) = &z {
        header.push("K_directional".into());
        cols.push(col(&k_directional(&p.flow, &p.y0, z, p.norm, times)?));
    }
    let blank = vec![None; times.len()];
    let (kinf, kinf_dir, osf, ot, lo, hi) = match &limit {
        Limit::Mode(rm) => {
            t.meta("k_inf_route", "rightmost eigenvectors");
            let kinf = k_inf_worst(rm, &p.y0, times)?;
            let kd = z.as_ref().map(|z| k_inf_directional(rm, &p.y0, z, times)).transpose()?;
            let osf = osf_worst(rm, &p.y0)?;
            let ot: Vec<Option<f64>> = match rm.kind {
                ModeKind::Real => vec![Some(1.0); times.len()],
                ModeKind::ComplexPair => {
                    times.iter().map(|&s| ot_worst(rm, s, &p.y0).map(Some)).collect::<Result<_>>()?
                }
            };
            let (lo, hi) = match rm.kind {
                ModeKind::Real => (vec![Some(osf); times.len()], vec![Some(osf); times.len()]),
                ModeKind::ComplexPair if p.norm == NormKind::P2 => {
                    let b = ot_bounds(overlap_v(rm), overlap_w(rm));
                    t.meta("v1", fmt_float(overlap_v(rm)));
                    t.meta("w1", fmt_float(overlap_w(rm)));
                    (vec![Some(osf * b.a_min); times.len()], vec![Some(osf * b.a_max); times.len()])
                }
                ModeKind::ComplexPair => (blank.clone(), blank.clone()),
            };
            (kinf, kd, vec![Some(osf); times.len()], ot, lo, hi)
        }
        Limit::Operator(op, route) => {
            t.meta("k_inf_route", route);
            let kinf = k_inf_worst_q1(op, &p.y0, p.norm, times)?;
            let kd = z.as_ref().map(|z| k_inf_directional_q1(op, &p.y0, z, p.norm, times)).transpose()?;
            (kinf, kd, blank.clone(), blank.clone(), blank.clone(), blank.clone())
        }
    };
    header.push("K_inf".into());
    cols.push(col(&kinf));
    if let Some(kd) = &kinf_dir {
        header.push("K_inf_directional".into());
        cols.push(col(kd));
    }
    for (name, c) in [("OSF", osf), ("OT", ot), ("lower_bound", lo), ("upper_bound", hi)] {
        header.push(name.into());
        cols.push(c);
    }
    if let Some(yt) = &p.y0_tilde {
        let pert = Perturbation::new(p.y0.clone(), yt.clone(), p.norm)?;
        t.meta("epsilon", fmt_float(pert.epsilon));
        let (rel, _) = error_curves(&p.flow, &p.y0, yt, p.norm, times)?;
        header.push("delta".into());
        cols.push(col(&rel));
    }
    header.push("precision_bound".into());
    cols.push(precision_column(&p).unwrap_or(blank));
    t.header = header;
    t.rows = (0..times.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok(t)
}

fn precision_column(p: &Problem) -> Option<Vec<Option<f64>>> {
    let dec = p.dec.as_ref()?;
    let part = partition_spectrum(dec, LEVEL_TOL);
    let modes = all_modes(dec, &part, p.norm).ok()?;
    eps_curves(&modes, &p.y0, None, &p.times).ok().map(|r| r.precision_worst)
}

/// Text report plus the curves as a table.
pub fn cmd_onset(a: &ProblemArgs) -> Result<(String, Table)> {
    let p = resolve(a)?;
    let dec = p
        .dec
        .as_ref()
        .ok_or_else(|| Error::Unsupported("onset bounds need a diagonalizable matrix".into()))?;
    let part = partition_spectrum(dec, LEVEL_TOL);
    let modes = all_modes(dec, &part, p.norm)?;
    rlge_check(&modes[0], &p.y0, RLGE_TOL)?;
    let bound = onset_time(&modes, &p.y0, a.precision, p.t_hat);
    let rep = onset_report(&modes, &p.y0, p.z0.as_ref(), &p.times, a.precision, p.t_hat)?;
    let k = k_worst(&p.flow, &p.y0, p.norm, &p.times)?;
    let kinf = k_inf_worst(&modes[0], &p.y0, &p.times)?;
    let measured = measured_onset(&p.times, &k.values, &kinf.values, a.precision);

    let mut s = String::new();
    s.push_str(&format!("source = {}\n", p.source));
    s.push_str(&format!("norm = {}\n", p.norm));
    s.push_str(&format!("levels = {}\n", modes.len()));
    s.push_str(&format!("t_hat = {}\n", fmt_float(p.t_hat)));
    s.push_str(&format!("target_precision = {}\n", fmt_float(a.precision)));
    match bound {
        Ok(b) => s.push_str(&format!("formula_bound_chars = {}\n", fmt_float(b))),
        Err(Error::UnsupportedNorm(m)) => s.push_str(&format!("formula_bound_chars = unavailable ({m})\n")),
        Err(e) => return Err(e),
    }
    let chars = |x: Option<f64>| x.map_or("not reached".to_string(), |v| fmt_float(v / p.t_hat));
    s.push_str(&format!("empirical_t_star_chars = {}\n", chars(rep.t_star)));
    s.push_str(&format!("measured_onset_chars = {}\n", chars(measured)));
    if modes.len() > 1 {
        let f1 = modes[0].f;
        for (j, m) in modes.iter().enumerate().skip(1) {
            s.push_str(&format!(
                "level {}: f_j/f_1 = {}, log(f_j/f_1)/((r_1-r_j) t_hat) = {}\n",
                j + 1,
                fmt_float(m.f / f1),
                fmt_float((m.f / f1).ln() / ((modes[0].lambda.re - m.lambda.re) * p.t_hat))
            ));
        }
    }

    let mut t = Table::default();
    t.meta("command", "onset");
    t.meta("source", &p.source);
    t.meta("norm", p.norm);
    t.meta("t_hat", fmt_float(p.t_hat));
    t.header = ["t", "eps_y", "eps_worst", "precision_worst", "K_direct", "K_inf"].map(String::from).to_vec();
    t.rows = (0..p.times.len())
        .map(|i| {
            vec![
                Some(p.times[i]),
                Some(rep.eps_y[i]),
                Some(rep.eps_worst[i]),
                rep.precision_worst[i],
                Some(k.values[i]),
                Some(kinf.values[i]),
            ]
        })
        .collect();
    Ok((s, t))
}

fn summary_lines(name: &str, s: Option<StatSummary>) -> Vec<String> {
    match s {
        None => vec![format!("{name}: no samples")],
        Some(s) => vec![format!(
            "{name}: count={} min={} d1={} median={} d9={} p99={} max={} mean={}",
            s.count,
            fmt_float(s.min),
            fmt_float(s.decile1),
            fmt_float(s.median),
            fmt_float(s.decile9),
            fmt_float(s.percentile99),
            fmt_float(s.max),
            fmt_float(s.mean)
        )],
    }
}

fn seed_meta(t: &mut Table, seed: u64, trials: usize) {
    t.meta("rng", RngSpec::ALGORITHM);
    t.meta("seed", seed);
    t.meta("trials", trials);
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    split_entries(s).map(|x| x.parse::<f64>().map_err(|_| Error::Input(format!("bad number '{x}'")))).collect()
}

pub fn cmd_census(a: &CensusArgs) -> Result<Table> {
    let thresholds = parse_list(&a.thresholds)?;
    let r = census_v1w1(a.n, a.trials, a.common.seed, &thresholds)?;
    let mut t = Table::default();
    t.meta("command", "census");
    seed_meta(&mut t, a.common.seed, a.trials);
    t.meta("n", a.n);
    t.header = ["index", "V1", "W1"].map(String::from).to_vec();
    t.rows = r.pairs.iter().enumerate().map(|(i, &(v, w))| vec![Some(i as f64), Some(v), Some(w)]).collect();
    t.footer.extend(summary_lines("V1", r.v1));
    t.footer.extend(summary_lines("W1", r.w1));
    for (thr, pct) in &r.exceedance {
        t.footer.push(format!("percent V1 > {thr}: {}", fmt_float(*pct)));
    }
    t.footer.push(format!("rejected (real rightmost): {}", r.rejections.filter));
    t.footer.push(format!("rejected (other): {}", r.rejections.total() - r.rejections.filter));
    Ok(t)
}

pub fn cmd_ratio(a: &RatioArgs) -> Result<Table> {
    let mut cfg = RatioConfig::new(a.n, a.trials, a.common.seed);
    cfg.norm = parse_norm(&a.norm)?;
    cfg.sampler = a.sampler.parse::<Sampler>()?;
    cfg.filter = a.filter.parse::<RightmostFilter>()?;
    cfg.horizon_chars = a.tmax_chars;
    cfg.points = a.points;
    let r = ratio_r_study(&cfg)?;
    let mut t = Table::default();
    t.meta("command", "ratio");
    seed_meta(&mut t, a.common.seed, a.trials);
    t.meta("n", a.n);
    t.meta("norm", cfg.norm);
    t.meta("sampler", &a.sampler);
    t.meta("filter", &a.filter);
    t.meta("grid", format!("{} points on [0, {} t_hat]", cfg.points, cfg.horizon_chars));
    t.header = ["index", "complex_rightmost", "t_hat", "max_K", "max_K_inf", "R"].map(String::from).to_vec();
    t.rows = r
        .records
        .iter()
        .map(|x| {
            vec![
                Some(x.index as f64),
                Some(if x.complex_rightmost { 1.0 } else { 0.0 }),
                Some(x.t_hat),
                Some(x.max_k),
                Some(x.max_k_inf),
                Some(x.r),
            ]
        })
        .collect();
    t.footer.extend(summary_lines("R", r.summary));
    let rs: Vec<f64> = r.records.iter().map(|x| x.r).collect();
    t.footer.push(format!("percent R > 10: {}", fmt_float(crate::experiments::percent_above(&rs, 10.0))));
    let rj = r.rejections;
    t.footer.push(format!(
        "rejected: filter={} non_generic={} rlge={} numeric={}",
        rj.filter, rj.non_generic, rj.rlge, rj.numeric
    ));
    Ok(t)
}

pub fn cmd_components(a: &ComponentsArgs) -> Result<Table> {
    let mut t = Table::default();
    t.meta("command", "components");
    seed_meta(&mut t, a.common.seed, a.trials);
    t.meta("kind", &a.kind);
    match a.kind.as_str() {
        "gdpnd" => {
            let mut cfg = GdpndConfig::new(a.trials, a.common.seed);
            cfg.coef_range = (a.coef_lo, a.coef_hi);
            let r = gdpnd_componentwise_study(&cfg)?;
            t.meta("coefficient_interval", format!("[{}, {}]", a.coef_lo, a.coef_hi));
            t.meta("horizon", cfg.horizon);
            t.header = vec!["index".into(), "R".into()];
            t.rows = r.r.iter().enumerate().map(|(i, &x)| vec![Some(i as f64), Some(x)]).collect();
            t.footer.extend(summary_lines("R", r.summary));
            for (thr, pct) in &r.exceedance {
                t.footer.push(format!("percent R > {thr}: {}", fmt_float(*pct)));
            }
        }
        "general" => {
            let cfg = GeneralComponentsConfig::new(a.n, a.trials, a.common.seed);
            let r = general_componentwise_study(&cfg)?;
            t.meta("n", a.n);
            t.header = vec!["index".into(), "t".into(), "R".into()];
            t.header.extend(cfg.thresholds.iter().map(|m| format!("fraction_above_{m}")));
            t.rows = r
                .records
                .iter()
                .map(|x| {
                    let mut row = vec![Some(x.index as f64), Some(x.t), Some(x.r)];
                    row.extend(x.fractions.iter().map(|&f| Some(f)));
                    row
                })
                .collect();
            for (ti, tv) in cfg.times.iter().enumerate() {
                t.footer.extend(summary_lines(&format!("R(t={tv})"), r.r_summary(ti)));
                for (mi, m) in cfg.thresholds.iter().enumerate() {
                    let (mean, max) = r.fraction_stats(ti, mi);
                    t.footer.push(format!("r(t={tv}, M={m}): mean={} max={}", fmt_float(mean), fmt_float(max)));
                }
            }
        }
        other => return Err(Error::Input(format!("unknown components kind '{other}' (gdpnd, general)"))),
    }
    Ok(t)
}

pub fn cmd_fjmax(a: &FjArgs) -> Result<Table> {
    let sampler = a.sampler.parse::<Sampler>()?;
    let r = fj_maxima_study(a.n, a.trials, a.common.seed, sampler)?;
    let mut t = Table::default();
    t.meta("command", "fjmax");
    seed_meta(&mut t, a.common.seed, a.trials);
    t.meta("n", a.n);
    t.meta("norm", NormKind::P2);
    t.meta("sampler", &a.sampler);
    t.header = ["index", "M", "M_hat"].map(String::from).to_vec();
    t.rows = r.records.iter().map(|x| vec![Some(x.index as f64), Some(x.m), Some(x.m_hat)]).collect();
    t.footer.extend(summary_lines("M", r.m));
    t.footer.extend(summary_lines("M_hat", r.m_hat));
    Ok(t)
}

pub fn cmd_model_run(name: &str) -> Result<String> {
    let s = preset(name)?;
    let (measured, checks) = run_scenario(&s)?;
    let mut out = format!("preset {name}: {}\nnorm = {}\nt_hat = {}\n", s.description, s.norm, fmt_float(s.t_hat));
    for m in &measured {
        out.push_str(&format!("{} = {}\n", m.id, fmt_float(m.value)));
    }
    for c in &checks {
        let v = c.value.map_or("missing".to_string(), fmt_float);
        out.push_str(&format!("{} {}: {} expected {}\n", if c.pass { "PASS" } else { "FAIL" }, c.id, v, c.target));
    }
    Ok(out)
}
