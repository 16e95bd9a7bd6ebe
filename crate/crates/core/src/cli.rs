//! Command-line front end: configuration, reports and file export.
//!
//! Reports are JSON with a top-level `"schema": 1`. Grids go to CSV and
//! meshes to OBJ. Exit codes: 0 ok, 1 other, 2 parse or configuration,
//! 3 frame or curvature degeneracy, 4 non-global section, 5 not integrable.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::complex_points::{index_sum, probe_slice, ComplexPointError};
use crate::expr::ExprError;
use crate::integrals::{gauss_bonnet, sphere_point, IntegralError};
use crate::model::{parse_constant, Chart, ChartPoint, CongruenceSpec, GlobalSection, ModelError};
use crate::sachs::{evolve_closed_form, integrate_rk4, sachs_residual, SachsError, SachsInitialData};
use crate::spin::{classify_twist, spin, SpinError, Twist};
use crate::surface::{mesh, reconstruct, Rect, SurfaceError};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    GaussBonnet,
    Indices,
    Surface,
    Sachs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ChartArg {
    N,
    S,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Self {
        match c {
            ChartArg::N => Chart::N,
            ChartArg::S => Chart::S,
        }
    }
}

/// Raw command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "clab", version, about = "Line congruences in minitwistor space")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Congruence spec: a JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    pub spec: String,
    /// Grid size (command-specific meaning, at least 8).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Tolerance (twist tolerance for analyze and surface).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Arclength of the evaluated slice; `r(u0, v0)` for surface.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV grid dump for analyze; defaults to the report path with `.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// OBJ mesh for surface; defaults to the report path with `.obj`.
    #[arg(long)]
    pub obj: Option<PathBuf>,
    /// Surface rectangle `u0,u1,v0,v1`.
    #[arg(long, allow_hyphen_values = true)]
    pub rect: Option<String>,
    #[arg(long, value_enum, default_value = "n")]
    pub chart: ChartArg,
    /// Initial `ρ` for a standalone sachs run, e.g. `1` or `0.5+0.2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub rho0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma0: Option<String>,
    /// Largest arclength offset tabulated by sachs.
    #[arg(long, default_value_t = 2.0)]
    pub span: f64,
}

/// Validated configuration, echoed in the report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub spec: String,
    pub grid: usize,
    pub tol: f64,
    pub r: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub obj: Option<PathBuf>,
    pub rect: Option<Rect>,
    pub chart: Chart,
    pub rho0: Option<[f64; 2]>,
    pub sigma0: Option<[f64; 2]>,
    pub span: f64,
    #[serde(skip)]
    pub spec_text: String,
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("frame degenerate at {count} of {total} grid nodes")]
    FrameDegeneracy { count: usize, total: usize },
    #[error(transparent)]
    Frame(#[from] SpinError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    ComplexPoints(#[from] ComplexPointError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Sachs(#[from] SachsError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Config(_) => 2,
            CliError::FrameDegeneracy { .. }
            | CliError::Frame(_)
            | CliError::Integral(IntegralError::Frame { .. } | IntegralError::DegenerateCurvature { .. })
            | CliError::ComplexPoints(ComplexPointError::Frame(_))
            | CliError::Surface(SurfaceError::Frame(_))
            | CliError::Sachs(SachsError::Frame(_)) => 3,
            CliError::Integral(IntegralError::NonGlobalSection { .. })
            | CliError::ComplexPoints(ComplexPointError::NonGlobalSection { .. }) => 4,
            CliError::Surface(SurfaceError::NotIntegrable { .. }) => 5,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "Parse",
            CliError::Config(_) => "Config",
            CliError::FrameDegeneracy { .. } | CliError::Frame(_) => "DegenerateFrame",
            CliError::Integral(IntegralError::NonGlobalSection { .. })
            | CliError::ComplexPoints(ComplexPointError::NonGlobalSection { .. }) => "NonGlobalSection",
            CliError::Integral(IntegralError::DegenerateCurvature { .. }) => "DegenerateCurvature",
            CliError::Integral(IntegralError::Frame { .. }) => "DegenerateFrame",
            CliError::Surface(SurfaceError::NotIntegrable { .. }) => "NotIntegrable",
            CliError::Surface(SurfaceError::PathInconsistent { .. }) => "PathInconsistent",
            CliError::ComplexPoints(_) => "ComplexPoints",
            CliError::Surface(_) => "Surface",
            CliError::Sachs(SachsError::FocalPoint { .. }) => "FocalPoint",
            CliError::Sachs(_) => "DegenerateFrame",
            CliError::Expr(_) | CliError::Integral(IntegralError::Expr(_)) => "Evaluation",
            CliError::Io { .. } => "Io",
        }
    }

    fn details(&self) -> Value {
        match self {
            CliError::FrameDegeneracy { count, total } => json!({ "count": count, "total": total }),
            CliError::Integral(IntegralError::NonGlobalSection { residual })
            | CliError::ComplexPoints(ComplexPointError::NonGlobalSection { residual }) => {
                json!({ "transition_residual": residual })
            }
            CliError::Surface(SurfaceError::NotIntegrable { max_im_rho }) => json!({ "max_im_rho": max_im_rho }),
            CliError::Surface(SurfaceError::PathInconsistent { residual, bound }) => {
                json!({ "residual": residual, "bound": bound })
            }
            _ => Value::Null,
        }
    }
}

/// Non-fatal conditions; each mirrors a library error.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Warning {
    /// `SpinError::DegenerateFrame` at some samples.
    DegenerateFrame { count: usize, total: usize },
    /// `SachsError::FocalPoint` met on a line or a surface.
    FocalPoint { r: f64, at: Option<ChartPoint> },
    /// `ComplexPointError::DegenerateShear`: zeros are not isolated.
    DegenerateShear,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: Command,
    pub config: RunConfig,
    pub results: Map<String, Value>,
    pub tables: Map<String, Value>,
    pub warnings: Vec<Warning>,
    pub error: Option<ErrorInfo>,
    pub wall_time_s: f64,
}

#[derive(Default)]
struct Outcome {
    results: Map<String, Value>,
    tables: Map<String, Value>,
    warnings: Vec<Warning>,
}

impl Outcome {
    fn result(&mut self, name: &str, v: impl Serialize) {
        self.results.insert(name.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn table(&mut self, name: &str, rows: Vec<Value>) {
        self.tables.insert(name.into(), Value::Array(rows));
    }
}

fn parse_rect(text: &str) -> Result<Rect, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("--rect `{text}`: {e}")))?;
    match parts[..] {
        [u0, u1, v0, v1] if u0 < u1 && v0 < v1 => Ok(Rect::new(u0, u1, v0, v1)),
        _ => Err(CliError::Config(format!("--rect `{text}` must be u0,u1,v0,v1 with u0<u1, v0<v1"))),
    }
}

fn parse_complex(flag: &str, text: &str) -> Result<[f64; 2], CliError> {
    let z = parse_constant(text).map_err(|e| CliError::Config(format!("{flag} `{text}`: {e}")))?;
    Ok([z.re, z.im])
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let spec_text = if args.spec.trim_start().starts_with('{') {
            args.spec.clone()
        } else {
            std::fs::read_to_string(&args.spec)
                .map_err(|e| CliError::Parse(format!("cannot read spec `{}`: {e}", args.spec)))?
        };
        let grid = args.grid.unwrap_or(match args.command {
            Command::Analyze => 32,
            Command::GaussBonnet => 128,
            Command::Indices => 48,
            Command::Surface => 33,
            Command::Sachs => 8,
        });
        if grid < 8 {
            return Err(CliError::Config(format!("--grid {grid} is below the minimum of 8")));
        }
        let tol = args.tol.unwrap_or(match args.command {
            Command::GaussBonnet => 1e-6,
            Command::Sachs => 1e-9,
            _ => 1e-9,
        });
        if !(tol > 0.0) {
            return Err(CliError::Config(format!("--tol {tol} must be positive")));
        }
        if args.r.is_some_and(|r| !r.is_finite()) {
            return Err(CliError::Config("--r must be finite".into()));
        }
        if !(args.span > 0.0 && args.span.is_finite()) {
            return Err(CliError::Config(format!("--span {} must be positive", args.span)));
        }
        let derived = |flag: &Option<PathBuf>, ext: &str| {
            flag.clone().or_else(|| args.out.as_ref().map(|o| o.with_extension(ext)))
        };
        let rect = args.rect.as_deref().map(parse_rect).transpose()?;
        let rho0 = args.rho0.as_deref().map(|t| parse_complex("--rho0", t)).transpose()?;
        let sigma0 = args.sigma0.as_deref().map(|t| parse_complex("--sigma0", t)).transpose()?;
        if rho0.is_some() != sigma0.is_some() {
            return Err(CliError::Config("--rho0 and --sigma0 go together".into()));
        }
        Ok(RunConfig {
            command: args.command,
            spec: args.spec,
            grid,
            tol,
            r: args.r,
            seed: args.seed,
            csv: if args.command == Command::Analyze { derived(&args.csv, "csv") } else { None },
            obj: if args.command == Command::Surface { derived(&args.obj, "obj") } else { None },
            out: args.out,
            rect,
            chart: args.chart.into(),
            rho0,
            sigma0,
            span: args.span,
            spec_text,
            threads: args.threads,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io { context: format!("cannot create {}", path.display()), source })
}

fn io_ctx(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { context: format!("cannot write {}", path.display()), source }
}

fn cpx(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

fn point_json(cp: &ChartPoint) -> Value {
    json!({ "chart": cp.chart, "xi": cpx(cp.xi) })
}

#[derive(Default)]
struct Stats {
    min: f64,
    max: f64,
    sum: f64,
    n: usize,
}

impl Stats {
    fn push(&mut self, x: f64) {
        if self.n == 0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        self.sum += x;
        self.n += 1;
    }

    fn json(&self) -> Value {
        if self.n == 0 {
            return Value::Null;
        }
        json!({ "min": self.min, "max": self.max, "mean": self.sum / self.n as f64 })
    }
}

fn analyze(cfg: &RunConfig, sec: &GlobalSection) -> Result<Outcome, CliError> {
    let n = cfg.grid;
    let r = cfg.r.unwrap_or(0.0);
    let nodes: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| (0..2 * n).map(move |j| (PI * (i as f64 + 0.5) / n as f64, TAU * j as f64 / (2 * n) as f64)))
        .collect();
    let samples: Vec<(ChartPoint, f64, f64, Result<_, SpinError>)> = nodes
        .par_iter()
        .map(|&(theta, phi)| {
            let cp = sphere_point(theta, phi);
            let pj = sec.param_jet(&cp, r)?;
            Ok((cp, theta, phi, spin(&pj)))
        })
        .collect::<Result<_, ExprError>>()?;
    let total = samples.len();
    let degenerate = samples.iter().filter(|s| s.3.is_err()).count();
    if 2 * degenerate > total {
        return Err(CliError::FrameDegeneracy { count: degenerate, total });
    }
    let mut out = Outcome::default();
    if degenerate > 0 {
        out.warnings.push(Warning::DegenerateFrame { count: degenerate, total });
    }
    let (mut shear, mut twist, mut curv) = (Stats::default(), Stats::default(), Stats::default());
    let mut twisting = 0usize;
    let mut csv = match &cfg.csv {
        Some(p) => Some((p, create(p)?)),
        None => None,
    };
    if let Some((p, w)) = csv.as_mut() {
        writeln!(w, "chart,xi_re,xi_im,theta,phi,rho_re,rho_im,sigma_re,sigma_im,k,delta,twist").map_err(io_ctx(p))?;
    }
    for (cp, theta, phi, sd) in &samples {
        let line = match sd {
            Ok(sd) => {
                shear.push(sd.sigma.norm());
                twist.push(sd.rho.im);
                curv.push(sd.k);
                let class = classify_twist(sd, cfg.tol);
                if class == Twist::Twisting {
                    twisting += 1;
                }
                let class = if class == Twist::Twisting { "twisting" } else { "integrable" };
                format!(
                    "{:?},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{class}",
                    cp.chart, cp.xi.re, cp.xi.im, theta, phi, sd.rho.re, sd.rho.im, sd.sigma.re, sd.sigma.im, sd.k, sd.delta
                )
            }
            Err(_) => format!(
                "{:?},{:e},{:e},{:e},{:e},NaN,NaN,NaN,NaN,NaN,NaN,degenerate",
                cp.chart, cp.xi.re, cp.xi.im, theta, phi
            ),
        };
        if let Some((p, w)) = csv.as_mut() {
            writeln!(w, "{line}").map_err(io_ctx(p))?;
        }
    }
    if let Some((p, mut w)) = csv {
        w.flush().map_err(io_ctx(p))?;
    }
    let good = total - degenerate;
    out.result("r", r);
    out.result("nodes", total);
    out.result("degenerate_nodes", degenerate);
    out.result("abs_sigma", shear.json());
    out.result("im_rho", twist.json());
    out.result("k", curv.json());
    out.result("twisting_fraction", twisting as f64 / good.max(1) as f64);
    out.result("all_integrable", twisting == 0);
    out.result("transition_residual", sec.transition_residual());
    Ok(out)
}

fn gauss_bonnet_cmd(cfg: &RunConfig, sec: &GlobalSection) -> Result<Outcome, CliError> {
    let r = match cfg.r {
        Some(r) => r,
        None => probe_slice(sec)?,
    };
    let exact = 4.0 * PI;
    let mut rungs = Vec::new();
    let mut n = 16;
    while n < cfg.grid {
        rungs.push(n);
        n *= 2;
    }
    rungs.push(cfg.grid);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut value = 0.0;
    for &nt in &rungs {
        value = gauss_bonnet(sec, nt, 2 * nt, r)?;
        let err = (value - exact).abs();
        errors.push(err);
        rows.push(json!({ "n_theta": nt, "n_phi": 2 * nt, "value": value, "abs_error": err }));
    }
    let mut out = Outcome::default();
    let rel = (value - exact).abs() / exact;
    out.result("r", r);
    out.result("value", value);
    out.result("exact", exact);
    out.result("rel_error", rel);
    out.result("within_tol", rel <= cfg.tol);
    let (first, last) = (errors[0], *errors.last().expect("non-empty"));
    out.result("error_ratio_first_last", if last > 0.0 { Some(first / last) } else { None });
    out.table("convergence", rows);
    Ok(out)
}

fn indices_cmd(cfg: &RunConfig, sec: &GlobalSection) -> Result<Outcome, CliError> {
    let rep = index_sum(sec, cfg.grid)?;
    let mut out = Outcome::default();
    if rep.degenerate {
        out.warnings.push(Warning::DegenerateShear);
    }
    out.result("degenerate", rep.degenerate);
    out.result("total_index", rep.total_index);
    out.result("zero_count", rep.zeros.len());
    out.result("probe_r", rep.probe_r);
    let rows = rep
        .zeros
        .iter()
        .map(|z| {
            let mut row = point_json(&z.point);
            row["index"] = json!(z.index);
            row["abs_sigma"] = json!(z.residual);
            row
        })
        .collect();
    out.table("zeros", rows);
    Ok(out)
}

fn surface_cmd(cfg: &RunConfig, sec: &GlobalSection) -> Result<Outcome, CliError> {
    let rect = cfg.rect.unwrap_or(Rect::square(1.0));
    let r0 = cfg.r.unwrap_or(0.0);
    let field = reconstruct(sec, cfg.chart, rect, cfg.grid, r0, cfg.tol)?;
    let m = mesh(sec, &field)?;
    let mut out = Outcome::default();
    // the surface may cross focal points of the congruence
    let mut focal = 0usize;
    let mut first = None;
    for j in 0..field.n {
        for i in 0..field.n {
            let cp = field.point(i, j);
            if spin(&sec.param_jet(&cp, field.r(i, j))?).is_err() {
                focal += 1;
                first.get_or_insert((field.r(i, j), cp));
            }
        }
    }
    if let Some((r, at)) = first {
        out.warnings.push(Warning::FocalPoint { r, at: Some(at) });
        out.result("focal_vertices", focal);
    }
    if let Some(p) = &cfg.obj {
        let mut w = create(p)?;
        m.write_obj(&mut w).and_then(|_| w.flush()).map_err(io_ctx(p))?;
    }
    let (lo, hi) = field.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    out.result("chart", field.chart);
    out.result("rect", rect);
    out.result("vertices", m.vertices.len());
    out.result("triangles", m.triangles.len());
    out.result("path_residual", field.path_residual);
    out.result("closedness_estimate", field.closedness_estimate);
    out.result("r_min", lo);
    out.result("r_max", hi);
    Ok(out)
}

fn offsets(span: f64) -> Vec<f64> {
    (1..=8).map(|k| span * k as f64 / 8.0).collect()
}

fn sachs_cmd(cfg: &RunConfig, sec: &GlobalSection) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let mut focal_rows = Vec::new();
    let (mut max_direct, mut max_rk4, mut max_res, mut max_tri) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let ts = offsets(cfg.span);
    let manual = cfg.rho0.zip(cfg.sigma0).map(|(a, b)| {
        SachsInitialData::new(Complex::new(a[0], a[1]), Complex::new(b[0], b[1]))
    });
    let base_r = cfg.r.unwrap_or(0.0);
    let lines: Vec<(Option<ChartPoint>, SachsInitialData)> = match manual {
        Some(init) => vec![(None, init)],
        None => {
            let mut v = Vec::new();
            let mut bad = 0;
            let golden = PI * (3.0 - 5f64.sqrt());
            for k in 0..cfg.grid {
                let theta = PI * (k as f64 + 0.5) / cfg.grid as f64;
                let cp = sphere_point(theta, golden * k as f64);
                match spin(&sec.param_jet(&cp, base_r)?) {
                    Ok(sd) => v.push((Some(cp), SachsInitialData::from_spin(&sd))),
                    Err(_) => bad += 1,
                }
            }
            if bad > 0 {
                out.warnings.push(Warning::DegenerateFrame { count: bad, total: cfg.grid });
            }
            v
        }
    };
    for (idx, (cp, init)) in lines.iter().enumerate() {
        let focal = init.focal_points();
        focal_rows.push(json!({ "line": idx, "focal_points": focal }));
        for &f in &focal {
            out.warnings.push(Warning::FocalPoint { r: base_r + f, at: *cp });
        }
        for &t in &ts {
            let closed = match evolve_closed_form(init, t) {
                Ok(v) => v,
                Err(SachsError::FocalPoint { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            // RK4 only along focal-free segments
            let crosses = focal.iter().any(|&f| f > 0.0 && f <= t);
            let rk4 = if crosses {
                None
            } else {
                integrate_rk4(init, t, (2000.0 * t).ceil() as usize).ok()
            };
            let diff = |a: (Complex, Complex), b: (Complex, Complex)| (a.0 - b.0).norm().max((a.1 - b.1).norm());
            let mut row = json!({
                "line": idx,
                "r": base_r + t,
                "rho": cpx(closed.0),
                "sigma": cpx(closed.1),
                "rk4_vs_closed": rk4.map(|v| diff(v, closed)),
            });
            let mut tri = rk4.map_or(0.0, |v| diff(v, closed));
            if let Some(c) = cp {
                let pj = sec.param_jet(c, base_r + t)?;
                match spin(&pj) {
                    Ok(sd) => {
                        let d = diff((sd.rho, sd.sigma), closed);
                        let (rr, rs) = sachs_residual(&pj)?;
                        max_direct = max_direct.max(d);
                        max_res = max_res.max(rr.max(rs));
                        tri = tri.max(d);
                        if let Some(v) = rk4 {
                            tri = tri.max(diff(v, (sd.rho, sd.sigma)));
                        }
                        row["direct_vs_closed"] = json!(d);
                        row["residual_rho"] = json!(rr);
                        row["residual_sigma"] = json!(rs);
                    }
                    Err(_) => continue,
                }
                row["chart"] = json!(c.chart);
                row["xi"] = json!(cpx(c.xi));
            }
            if let Some(v) = rk4 {
                max_rk4 = max_rk4.max(diff(v, closed));
            }
            row["triangle_max"] = json!(tri);
            max_tri = max_tri.max(tri);
            rows.push(row);
        }
    }
    out.result("lines", lines.len());
    out.result("base_r", base_r);
    if let Some((_, init)) = lines.first().filter(|_| manual.is_some()) {
        out.result("focal_points", init.focal_points());
    } else {
        out.result("max_direct_vs_closed", max_direct);
        out.result("max_residual", max_res);
    }
    out.result("max_rk4_vs_closed", max_rk4);
    out.result("max_triangle", max_tri);
    out.table("evolution", rows);
    out.table("focal_points", focal_rows);
    Ok(out)
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = CongruenceSpec::from_json(&cfg.spec_text)?;
    let sec = spec.build(cfg.seed)?;
    match cfg.command {
        Command::Analyze => analyze(cfg, &sec),
        Command::GaussBonnet => gauss_bonnet_cmd(cfg, &sec),
        Command::Indices => indices_cmd(cfg, &sec),
        Command::Surface => surface_cmd(cfg, &sec),
        Command::Sachs => sachs_cmd(cfg, &sec),
    }
}

/// Runs one command on a dedicated thread pool and returns the report
/// with the exit code.
pub fn execute(cfg: &RunConfig) -> (Report, i32) {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(cfg)),
        Err(e) => Err(CliError::Config(format!("thread pool: {e}"))),
    };
    let (outcome, error, code) = match result {
        Ok(o) => (o, None, 0),
        Err(e) => {
            let info = ErrorInfo { kind: e.kind(), message: e.to_string(), details: e.details() };
            (Outcome::default(), Some(info), e.exit_code())
        }
    };
    let report = Report {
        schema: SCHEMA,
        command: cfg.command,
        config: cfg.clone(),
        results: outcome.results,
        tables: outcome.tables,
        warnings: outcome.warnings,
        error,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    (report, code)
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let (report, code) = execute(&cfg);
    if let Some(err) = &report.error {
        eprintln!("error: {}", err.message);
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    let written = match &cfg.out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => writeln!(io::stdout(), "{text}").map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return if code == 0 { 1 } else { code };
    }
    code
}
