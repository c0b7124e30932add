//! Command-line front end: `eval`, `thresholds`, `trajectory`, `phase` and `verify`.
//!
//! Every command builds a [`Table`] and renders it as CSV (default), JSON or text. Exit
//! codes: 0 on success, 1 when a verification suite has a failing check, 2 on usage or
//! domain errors (with a one-line diagnostic on the error stream).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::competing_functionals::{minimizer, thresholds, FunctionalKind};
use crate::error::{Error, Result};
use crate::extended::thresholds_extended;
use crate::mueller_ho::{alpha_thresholds, j_jet, phase_sweep, solve_alpha0, Displacement};
use crate::report::{all_pass, Check};
use crate::theta_kernel::{
    theta2d_estimate, theta2d_shifted_estimate, Estimate, HalfPlanePoint, SeriesTruncation,
};
use crate::verifier::{run_suite, Suite, SuiteGrids};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

/// `lo:hi:n[:log]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub scale: SweepScale,
}

pub const DEFAULT_SWEEP_POINTS: usize = 256;

impl SweepSpec {
    pub fn new(lo: f64, hi: f64, n: usize, scale: SweepScale) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Parse(format!("sweep needs finite lo < hi, got {lo}:{hi}")));
        }
        if n < 2 {
            return Err(Error::Parse(format!("sweep needs at least 2 points, got {n}")));
        }
        if scale == SweepScale::Log && lo <= 0.0 {
            return Err(Error::Parse(format!("log sweep needs lo > 0, got {lo}")));
        }
        Ok(SweepSpec { lo, hi, n, scale })
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let t = i as f64 / last;
                if i + 1 == self.n {
                    return self.hi;
                }
                match self.scale {
                    SweepScale::Linear => self.lo + (self.hi - self.lo) * t,
                    SweepScale::Log => (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * t).exp(),
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?} in sweep {s:?}")));
        let (lo, hi, n, scale) = match parts.as_slice() {
            [lo, hi] => (num(lo)?, num(hi)?, DEFAULT_SWEEP_POINTS, SweepScale::Linear),
            [lo, hi, n] | [lo, hi, n, "lin"] => (num(lo)?, num(hi)?, parse_count(n, s)?, SweepScale::Linear),
            [lo, hi, n, "log"] => (num(lo)?, num(hi)?, parse_count(n, s)?, SweepScale::Log),
            _ => return Err(Error::Parse(format!("sweep must be lo:hi[:n[:log]], got {s:?}"))),
        };
        SweepSpec::new(lo, hi, n, scale)
    }
}

fn parse_count(t: &str, whole: &str) -> Result<usize> {
    t.trim().parse().map_err(|_| Error::Parse(format!("bad point count {t:?} in sweep {whole:?}")))
}

/// Parses `x+yi`, `x-yi`, `yi`, `i` or `x+i`, with optional exponents; `y` must be positive.
pub fn parse_complex(s: &str) -> Result<HalfPlanePoint> {
    let bad = || Error::Parse(format!("complex number must look like x+yi, got {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let x: f64 = re.parse().map_err(|_| bad())?;
    let y: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| bad())?,
    };
    if !(y > 0.0) {
        return Err(Error::Domain(format!("imaginary part must be positive, got {y}")));
    }
    HalfPlanePoint::new(x, y)
}

#[derive(Debug, Parser)]
#[command(name = "lattice-theta", version, about = "Lattice theta functions, competing functionals and the Mueller-Ho phase diagram")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tail tolerance for every series truncation.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one quantity at one point.
    Eval(EvalArgs),
    /// Threshold constants with their deltas against the printed values.
    Thresholds {
        #[arg(long, value_enum, default_value_t = Precision::Double)]
        precision: Precision,
    },
    /// Trace the minimizer of W1 or W2 over a sweep in rho.
    Trajectory {
        #[arg(value_enum, ignore_case = true)]
        kind: KindArg,
        /// lo:hi[:n[:log]]; defaults to 0:2 for W1 and 0:40 for W2 with 256 points.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
    },
    /// Mueller-Ho phase rows over a sweep in alpha.
    Phase {
        /// lo:hi[:n[:log]] inside [-1, 1]; defaults to -1:1:256.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum, ignore_case = true)]
        suite: SuiteArg,
        /// Grid size of the brute-force minimization oracle.
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "W1")]
    W1,
    #[value(name = "W2")]
    W2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Identities,
    Thresholds,
    Appendix,
    Oracle,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalExpr {
    #[value(name = "theta")]
    Theta,
    #[value(name = "theta_shifted")]
    ThetaShifted,
    #[value(name = "W1")]
    W1,
    #[value(name = "W2")]
    W2,
    #[value(name = "J")]
    J,
    #[value(name = "E_MH")]
    EMh,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(value_enum, ignore_case = true)]
    expr: EvalExpr,
    /// Point of the upper half-plane, as x+yi.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// Inverse temperature of theta and theta_shifted.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Weight of W1 and W2.
    #[arg(long)]
    rho: Option<f64>,
    /// Coupling of E_MH, in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// First displacement coordinate of J and E_MH.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    /// Second displacement coordinate of J and E_MH.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Also report the (a, b)-gradient (J and E_MH only).
    #[arg(long)]
    grad: bool,
}

/// Rows with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Self::cell)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Domain(format!("csv output failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Domain(format!("csv output is not UTF-8: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&rows)
            .map(|s| s + "\n")
            .map_err(|e| Error::Domain(format!("json output failed: {e}")))
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Self::cell).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| cells.iter().map(|r| r[i].len()).chain([self.columns[i].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, items: Vec<&str>| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, self.columns.clone());
        for r in &cells {
            line(&mut out, r.iter().map(String::as_str).collect());
        }
        out
    }

    fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => Ok(self.to_text()),
        }
    }
}

fn num(v: f64) -> Value {
    json!(v)
}

fn kind_of(k: KindArg) -> FunctionalKind {
    match k {
        KindArg::W1 => FunctionalKind::W1,
        KindArg::W2 => FunctionalKind::W2,
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Parse(format!("--{name} is required for this expression")))
}

fn cmd_eval(args: &EvalArgs, trunc: SeriesTruncation) -> Result<Table> {
    let z = parse_complex(&args.z)?;
    let d = Displacement::new(args.a, args.b)?;
    let mut cols = vec!["expr", "x", "y", "value", "tail"];
    if args.grad {
        if !matches!(args.expr, EvalExpr::J | EvalExpr::EMh) {
            return Err(Error::Parse("--grad applies to J and E_MH only".into()));
        }
        cols.extend(["grad_a", "grad_b"]);
    }
    let (name, est, grad): (&str, Estimate, Option<(f64, f64)>) = match args.expr {
        EvalExpr::Theta => ("theta", theta2d_estimate(args.s, z, trunc)?, None),
        EvalExpr::ThetaShifted => ("theta_shifted", theta2d_shifted_estimate(args.s, z, trunc)?, None),
        EvalExpr::W1 | EvalExpr::W2 => {
            let rho = require("rho", args.rho)?;
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(Error::Domain(format!("rho must be finite and non-negative, got {rho}")));
            }
            let (s_shift, s_plain, name) = match args.expr {
                EvalExpr::W1 => (2.0, 1.0, "W1"),
                _ => (1.0, 2.0, "W2"),
            };
            let e = theta2d_shifted_estimate(s_shift, z, trunc)? + theta2d_estimate(s_plain, z, trunc)? * rho;
            (name, e, None)
        }
        EvalExpr::J => {
            let jet = j_jet(z, d, trunc)?;
            ("J", Estimate { value: jet.value, tail: jet.tail }, Some((jet.da, jet.db)))
        }
        EvalExpr::EMh => {
            let alpha = require("alpha", args.alpha)?;
            if !(-1.0..=1.0).contains(&alpha) {
                return Err(Error::Domain(format!("alpha must lie in [-1, 1], got {alpha}")));
            }
            let jet = j_jet(z, d, trunc)?;
            let theta = theta2d_estimate(1.0, z, trunc)?;
            let e = theta + Estimate { value: jet.value, tail: jet.tail } * alpha;
            ("E_MH", e, Some((alpha * jet.da, alpha * jet.db)))
        }
    };
    let mut t = Table::new(&cols);
    let mut row = vec![json!(name), num(z.x()), num(z.y()), num(est.value), num(est.tail)];
    if args.grad {
        let (ga, gb) = grad.expect("gradient is computed for J and E_MH");
        row.extend([num(ga), num(gb)]);
    }
    t.push(row);
    Ok(t)
}

/// Printed values of the threshold constants.
pub const PRINTED_THRESHOLDS: [(&str, f64); 9] = [
    ("rho1", 0.04016680351),
    ("rho2", 1.190861337),
    ("sigma1a", 0.04016),
    ("sigma1b", 0.83972),
    ("sigma2a", 1.190861337),
    ("sigma2b", 24.89618074),
    ("alpha0", 0.1726645),
    ("alpha1", 0.3732155067),
    ("alpha2", 0.9256496973),
];

fn cmd_thresholds(precision: Precision, trunc: SeriesTruncation) -> Result<Table> {
    let th = thresholds();
    let (a1, a2) = alpha_thresholds();
    let a0 = solve_alpha0(trunc)?.alpha0;
    let double = [th.rho1, th.rho2, th.sigma1a, th.sigma1b, th.sigma2a, th.sigma2b, a0, a1, a2];
    let extended: Option<[Option<String>; 9]> = match precision {
        Precision::Double => None,
        Precision::Extended => {
            let e = thresholds_extended(32)?;
            Some([
                Some(e.rho1.clone()),
                Some(e.rho2.clone()),
                Some(e.rho1),
                Some(e.sigma1b),
                Some(e.rho2),
                Some(e.sigma2b),
                None,
                Some(e.alpha1),
                Some(e.alpha2),
            ])
        }
    };
    let mut t = Table::new(&["name", "computed", "reference", "delta"]);
    for (i, (name, reference)) in PRINTED_THRESHOLDS.iter().enumerate() {
        let computed = match extended.as_ref().and_then(|e| e[i].clone()) {
            Some(s) => json!(s),
            None => num(double[i]),
        };
        t.push(vec![json!(name), computed, num(*reference), num(double[i] - reference)]);
    }
    let product = th.sigma2b * th.rho1;
    t.push(vec![json!("sigma2b_times_rho1"), num(product), num(1.0), num(product - 1.0)]);
    Ok(t)
}

fn default_sweep(lo: f64, hi: f64) -> SweepSpec {
    SweepSpec { lo, hi, n: DEFAULT_SWEEP_POINTS, scale: SweepScale::Linear }
}

fn cmd_trajectory(kind: FunctionalKind, sweep: SweepSpec, trunc: SeriesTruncation) -> Result<Table> {
    if sweep.lo < 0.0 {
        return Err(Error::Domain(format!("rho sweep must start at rho >= 0, got {}", sweep.lo)));
    }
    let rhos = sweep.points();
    let pts = rhos.iter().map(|&r| minimizer(kind, r)).collect::<Result<Vec<_>>>()?;
    // one-sided slopes at each sweep point bound how far the minimizer may move in one step
    let eps = sweep.step() / 100.0;
    let dist = |a: HalfPlanePoint, b: HalfPlanePoint| (a.x() - b.x()).hypot(a.y() - b.y());
    let mut t = Table::new(&["rho", "x", "y", "branch", "value", "continuous"]);
    for (i, p) in pts.iter().enumerate() {
        let continuous = if i == 0 {
            true
        } else {
            let prev = &pts[i - 1];
            let fwd = dist(minimizer(kind, prev.rho + eps)?.z, prev.z) / eps;
            let back = dist(p.z, minimizer(kind, (p.rho - eps).max(0.0))?.z) / eps;
            dist(p.z, prev.z) <= 10.0 * sweep.step() * fwd.max(back) + 1e-9
        };
        let value = crate::competing_functionals::w_eval(kind, p.rho, p.z, trunc)?;
        t.push(vec![
            num(p.rho),
            num(p.z.x()),
            num(p.z.y()),
            json!(p.branch.to_string()),
            num(value),
            json!(continuous),
        ]);
    }
    Ok(t)
}

fn cmd_phase(sweep: SweepSpec, trunc: SeriesTruncation) -> Result<Table> {
    if sweep.lo < -1.0 || sweep.hi > 1.0 {
        return Err(Error::Domain(format!("alpha sweep must stay inside [-1, 1], got {}:{}", sweep.lo, sweep.hi)));
    }
    let rows = phase_sweep(&sweep.points(), trunc)?;
    let mut t = Table::new(&["alpha", "shape", "x", "y", "angle_or_ratio", "energy", "a", "b", "below_alpha0"]);
    for r in rows {
        t.push(vec![
            num(r.alpha),
            json!(r.shape.to_string()),
            num(r.z.x()),
            num(r.z.y()),
            num(r.angle_or_ratio),
            num(r.energy),
            num(r.displacement.a()),
            num(r.displacement.b()),
            json!(r.below_alpha0),
        ]);
    }
    Ok(t)
}

fn check_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["name", "expected", "computed", "tolerance", "status"]);
    for c in checks {
        t.push(vec![
            json!(c.name),
            c.expected.map_or(Value::Null, num),
            num(c.computed),
            num(c.tolerance),
            json!(c.status()),
        ]);
    }
    t
}

enum Outcome {
    Table(Table),
    Checks(Vec<Check>),
}

fn dispatch(cli: &Cli, trunc: SeriesTruncation) -> Result<Outcome> {
    Ok(match &cli.command {
        Command::Eval(args) => Outcome::Table(cmd_eval(args, trunc)?),
        Command::Thresholds { precision } => Outcome::Table(cmd_thresholds(*precision, trunc)?),
        Command::Trajectory { kind, sweep } => {
            let kind = kind_of(*kind);
            let spec = match sweep {
                Some(s) => s.parse()?,
                None => match kind {
                    FunctionalKind::W1 => default_sweep(0.0, 2.0),
                    FunctionalKind::W2 => default_sweep(0.0, 40.0),
                },
            };
            Outcome::Table(cmd_trajectory(kind, spec, trunc)?)
        }
        Command::Phase { sweep } => {
            let spec = match sweep {
                Some(s) => s.parse()?,
                None => default_sweep(-1.0, 1.0),
            };
            Outcome::Table(cmd_phase(spec, trunc)?)
        }
        Command::Verify { suite, grid } => {
            let suite = match suite {
                SuiteArg::Identities => Suite::Identities,
                SuiteArg::Thresholds => Suite::Thresholds,
                SuiteArg::Appendix => Suite::Appendix,
                SuiteArg::Oracle => Suite::Oracle,
                SuiteArg::All => Suite::All,
            };
            let grids = SuiteGrids { brute: *grid, ..SuiteGrids::default() };
            Outcome::Checks(run_suite(suite, grids, trunc)?)
        }
    })
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let fail = |err: &mut dyn Write, e: &Error| {
        let _ = writeln!(err, "error: {e}");
        2
    };
    let trunc = match cli.tol {
        Some(tol) => match SeriesTruncation::new(SeriesTruncation::DEFAULT_MAX_INDEX, tol) {
            Ok(t) => t,
            Err(e) => return fail(err, &e),
        },
        None => SeriesTruncation::default(),
    };
    let outcome = match dispatch(&cli, trunc) {
        Ok(o) => o,
        Err(e) => return fail(err, &e),
    };
    let (text, code) = match &outcome {
        Outcome::Table(t) => (t.render(cli.format), 0),
        Outcome::Checks(checks) => {
            let code = if all_pass(checks) { 0 } else { 1 };
            let text = match cli.format {
                OutputFormat::Text => Ok(checks.iter().map(|c| format!("{c}\n")).collect()),
                f => check_table(checks).render(f),
            };
            (text, code)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => return fail(err, &e),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Domain(format!("cannot write output: {e}"))),
    };
    match written {
        Ok(()) => code,
        Err(e) => fail(err, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("lattice-theta").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_parsing() {
        let z = parse_complex("0.5+0.8660254i").unwrap();
        assert_eq!((z.x(), z.y()), (0.5, 0.8660254));
        let z = parse_complex("-1.5e-1+2E+0i").unwrap();
        assert_eq!((z.x(), z.y()), (-0.15, 2.0));
        assert_eq!(parse_complex("i").unwrap(), HalfPlanePoint::I);
        assert_eq!(parse_complex("0+i").unwrap(), HalfPlanePoint::I);
        assert_eq!(parse_complex("2i").unwrap().y(), 2.0);
        assert!(parse_complex("1-2i").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn sweep_parsing() {
        let s: SweepSpec = "0:2:5".parse().unwrap();
        assert_eq!(s.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let s: SweepSpec = "1:100:3:log".parse().unwrap();
        let p = s.points();
        assert!((p[1] - 10.0).abs() < 1e-12);
        let s: SweepSpec = "0:1".parse().unwrap();
        assert_eq!(s.n, DEFAULT_SWEEP_POINTS);
        assert!("1:0:5".parse::<SweepSpec>().is_err());
        assert!("0:1:1".parse::<SweepSpec>().is_err());
        assert!("0:1:5:log".parse::<SweepSpec>().is_err());
        assert!("0:1:5:cubic".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn eval_theta_square() {
        let (code, out, _) = call(&["eval", "theta", "--s", "1", "--z", "0+1i"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("expr,x,y,value,tail"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let v: f64 = row[3].parse().unwrap();
        assert!((v - 1.1803).abs() < 5e-5);
    }

    #[test]
    fn eval_gradient_at_hexagonal_thirds() {
        let (code, out, _) = call(&[
            "eval", "J", "--z", "0.5+0.8660254037844386i", "--a", "0.3333333333333333", "--b",
            "0.3333333333333333", "--grad", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let row = &v[0];
        assert!(row["grad_a"].as_f64().unwrap().abs() < 1e-10);
        assert!(row["grad_b"].as_f64().unwrap().abs() < 1e-10);
    }

    #[test]
    fn eval_w1_and_errors() {
        let (code, out, _) = call(&["eval", "W1", "--rho", "0.4", "--z", "0+1i", "--format", "text"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("expr"));
        let (code, _, err) = call(&["eval", "W1", "--z", "0+1i"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:") && err.lines().count() == 1);
        let (code, _, _) = call(&["eval", "theta", "--z", "0-1i"]);
        assert_eq!(code, 2);
        let (code, _, _) = call(&["eval", "E_MH", "--alpha", "2", "--z", "i"]);
        assert_eq!(code, 2);
        let (code, _, _) = call(&["bogus"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn thresholds_table() {
        let (code, out, _) = call(&["thresholds"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "name,computed,reference,delta");
        assert_eq!(lines.len(), 11);
        assert!(lines[1].starts_with("rho1,") && lines[1].contains("0.04016680351"));
        assert!(lines[9].starts_with("alpha2,") && lines[9].contains("0.9256496973"));
        let last: Vec<&str> = lines[10].split(',').collect();
        assert_eq!(last[0], "sigma2b_times_rho1");
        assert!(last[3].parse::<f64>().unwrap().abs() <= 1e-12);
        let (code, out, _) = call(&["thresholds", "--precision", "extended", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v[0]["computed"].as_str().unwrap().starts_with("0.0401611445477626751804566"));
    }

    #[test]
    fn trajectory_shape() {
        let (code, out, _) = call(&["trajectory", "W1", "--sweep", "0:2:200"]);
        assert_eq!(code, 0);
        let rows: Vec<Vec<String>> =
            out.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect();
        assert_eq!(rows.len(), 200);
        let y0: f64 = rows[0][2].parse().unwrap();
        assert!((y0 - 3f64.sqrt()).abs() < 1e-6);
        let mut seq: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
        seq.dedup();
        assert_eq!(seq, vec!["segment", "corner", "arc"]);
        assert!(rows.iter().all(|r| r[5] == "true"));
    }

    #[test]
    fn phase_rows() {
        let (code, out, _) = call(&["phase", "--sweep", "-0.3:0.95:2", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[0]["shape"], "hexagonal");
        assert_eq!(v[0]["a"], 0.0);
        assert_eq!(v[1]["shape"], "rectangular");
        let r = v[1]["angle_or_ratio"].as_f64().unwrap();
        assert!(r > 1.0 && r < 3f64.sqrt());
        let (_, out, _) = call(&["phase", "--sweep", "0.6:0.7:2", "--format", "json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[0]["shape"], "square");
        let (code, _, _) = call(&["phase", "--sweep", "-2:1:3"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn output_is_deterministic_and_file_backed() {
        let a = call(&["phase", "--sweep", "-1:1:16"]);
        let b = call(&["phase", "--sweep", "-1:1:16"]);
        assert_eq!(a, b);
        let path = std::env::temp_dir().join(format!("lattice-theta-cli-{}.csv", std::process::id()));
        let (code, out, _) = call(&["phase", "--sweep", "-1:1:16", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), a.1);
        let _ = std::fs::remove_file(path);
    }

    #[test]
    fn verify_identities_passes() {
        let (code, out, _) = call(&["verify", "identities", "--format", "text"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().all(|l| l.ends_with("PASS")));
    }

    #[test]
    fn verify_reports_failures_with_exit_one() {
        let (code, out, _) = call(&["verify", "appendix", "--format", "text"]);
        assert!(out.lines().any(|l| l.starts_with("delta_q_half expected=0.188822585") && l.ends_with("PASS")));
        // the printed case (d) value belongs to x = 2/5, not x = 1/2
        assert!(out.lines().any(|l| l.starts_with("case_d_margin") && l.ends_with("FAIL")));
        assert_eq!(code, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }
}
