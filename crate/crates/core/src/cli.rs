//! Command-line front end.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::dinkelbach::{dinkelbach_solve, write_trace, DinkelbachConfig};
use crate::eigen::{self, build_problem, Extremum, Kind, MultiStart, MultiStartReport};
use crate::error::{Error, Result};
use crate::pam::{write_history, Init};
use crate::tensor::{parse_tensor, read_tensor, SymTensor};
use crate::trust_region::{
    check_second_order, random_cubic, read_poly, solve_boundary, BoundaryResult, CubicScales,
    MultiplierSign, TaylorPoly, TrConfig,
};
use crate::verify::{self, Check};

/// Seed used when neither `--seed` nor `SPECTEIG_SEED` is given.
pub const DEFAULT_SEED: u64 = 2024;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_INVALID_B: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "specteig", version, about = "Generalized tensor eigenpairs and boundary trust-region steps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal eigenpairs of a tensor file by multistart Dinkelbach iterations.
    Eigen(EigenArgs),
    /// Re-runs the bundled numerical examples with their published settings.
    Examples(ExamplesArgs),
    /// Minimizes a Taylor model on the sphere of radius delta.
    TrustRegion(TrustRegionArgs),
    /// Runs the verification battery.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Z,
    H,
    D,
    B,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Z => Kind::Z,
            KindArg::H => Kind::H,
            KindArg::D => Kind::D,
            KindArg::B => Kind::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "5.1")]
    Z,
    #[value(name = "5.2")]
    H,
    #[value(name = "5.3")]
    D,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Concavification weight; defaults to the Frobenius norm of the shifted tensor.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Proximal weight, one value or a comma-separated list per block.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    /// Inner stopping threshold.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Outer stopping threshold.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "SPECTEIG_SEED")]
    pub seed: Option<u64>,
    /// Range of the uniform start entries, `lo:hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub init_range: Option<(f64, f64)>,
    #[arg(long)]
    pub max_inner: Option<usize>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Worker threads for independent trials; 0 picks the default.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EigenArgs {
    pub tensor: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Z)]
    pub kind: KindArg,
    /// Right-hand tensor for `d` and `b` problems.
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Largest instead of smallest eigenvalues.
    #[arg(long)]
    pub max: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Writes the Dinkelbach trace of the first trial as CSV.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    #[arg(value_enum)]
    pub which: Which,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Also writes the JSON report to this file.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrustRegionArgs {
    /// JSON polynomial file.
    #[arg(conflicts_with = "random")]
    pub poly: Option<PathBuf>,
    /// Random cubic of this dimension instead of a file.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, env = "SPECTEIG_SEED")]
    pub seed: Option<u64>,
    /// Scales `a,b,c` of the random gradient, Hessian and third derivative.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [80.0, 80.0, 80.0])]
    pub scales: Vec<f64>,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Radii `lo:hi:step`.
    #[arg(long, value_parser = parse_sweep)]
    pub delta_sweep: Option<(f64, f64, f64)>,
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_inner: Option<usize>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Starts: zero, then seeded random boundary points.
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    /// Uses `lambda = s^T grad T / delta^2` instead of its negative.
    #[arg(long)]
    pub flip_sign: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Writes `k,value` per outer step (first radius of a sweep).
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Writes the inner PAM rows (first radius of a sweep).
    #[arg(long)]
    pub inner_history: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Replaces the bundled fourth-order example tensor.
    #[arg(long)]
    pub example2: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_sweep(s: &str) -> std::result::Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected lo:hi:step".into());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e}")))
        .collect::<std::result::Result<_, _>>()?;
    if !(v[0] > 0.0 && v[1] >= v[0] && v[2] > 0.0) {
        return Err(format!("need 0 < lo <= hi and step > 0, got {s}"));
    }
    Ok((v[0], v[1], v[2]))
}

fn sweep_values((lo, hi, step): (f64, f64, f64)) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| lo + k as f64 * step).collect()
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Denominator(_) => EXIT_INVALID_B,
        Error::Numerical { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: &Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Eigen(a) => cmd_eigen(a, out),
        Command::Examples(a) => cmd_examples(a, out),
        Command::TrustRegion(a) => cmd_trust_region(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn apply_solver(config: &mut DinkelbachConfig, opts: &mut MultiStart, s: &SolverArgs) -> Result<()> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Config(format!("--{name} must be positive, got {v}")))
        }
    };
    if let Some(a) = s.alpha {
        if !(a >= 0.0) {
            return Err(Error::Config(format!("--alpha must be nonnegative, got {a}")));
        }
        config.inner.alpha = Some(a);
    }
    if let Some(g) = &s.gamma {
        config.inner.gammas = g.clone();
    }
    if let Some(e) = s.eps {
        config.inner.eps = positive("eps", e)?;
    }
    if let Some(t) = s.tol {
        config.tol = positive("tol", t)?;
    }
    if let Some(n) = s.trials {
        opts.trials = n;
    }
    opts.base_seed = s.seed.unwrap_or(DEFAULT_SEED);
    if let Some((lo, hi)) = s.init_range {
        config.inner.init = Init::Uniform { lo, hi };
    }
    if let Some(n) = s.max_inner {
        config.inner.max_iter = n;
    }
    if let Some(n) = s.max_outer {
        config.k_max = n;
    }
    opts.jobs = s.jobs;
    Ok(())
}

/// Adds the path to I/O failures.
fn at(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| at(path)(e.into()))?))
}

/// Drops pairs whose residual no longer meets the tolerance.
fn reverify(report: &mut MultiStartReport) {
    let tol = report.tol;
    report.pairs.retain(|p| {
        let ok = p.residual <= tol;
        if !ok {
            log::warn!("dropping lambda = {:.6} with residual {:.3e}", p.lambda, p.residual);
        }
        ok
    });
}

fn render_report(report: &MultiStartReport, format: Format) -> String {
    match format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
        Format::Json => serde_json::to_string_pretty(report).expect("plain data serializes") + "\n",
    }
}

fn cmd_eigen(a: &EigenArgs, out: &mut dyn Write) -> Result<i32> {
    let tensor = read_tensor(&a.tensor).map_err(at(&a.tensor))?;
    let b = a.b.as_ref().map(|p| read_tensor(p).map_err(at(p))).transpose()?;
    let extremum = if a.max { Extremum::Max } else { Extremum::Min };
    let problem = build_problem(tensor, a.kind.into(), b, extremum)?;
    let mut config = eigen::default_config();
    let mut opts = MultiStart::default();
    apply_solver(&mut config, &mut opts, &a.solver)?;
    let mut report = eigen::solve_multistart(&problem, &opts, &config)?;
    reverify(&mut report);
    if let Some(path) = &a.history {
        let mut cfg = config.clone();
        cfg.inner.seed = opts.base_seed;
        let r = dinkelbach_solve(problem.fractional(), &cfg)?;
        let mut f = create(path)?;
        write_trace(&r.trace, &mut f)?;
        f.flush()?;
    }
    out.write_all(render_report(&report, a.format).as_bytes())?;
    Ok(if report.pairs.is_empty() {
        EXIT_NO_CONVERGENCE
    } else {
        EXIT_OK
    })
}

/// One bundled example with its published settings.
#[derive(Debug, Clone)]
pub struct ExampleSetup {
    pub key: &'static str,
    pub title: &'static str,
    pub problem: eigen::GeneralizedEigenProblem,
    pub config: DinkelbachConfig,
    pub trials: usize,
}

fn bundled(text: &str) -> SymTensor {
    parse_tensor(text).expect("bundled tensors parse")
}

/// Settings for the bundled examples, in order: Z (two weights), H, D.
pub fn example_setups() -> Result<Vec<ExampleSetup>> {
    let z = build_problem(bundled(verify::EXAMPLE2), Kind::Z, None, Extremum::Min)?;
    let h = build_problem(bundled(verify::EXAMPLE3), Kind::H, None, Extremum::Min)?;
    let d = build_problem(
        bundled(verify::EXAMPLE4_A),
        Kind::D,
        Some(bundled(verify::EXAMPLE4_B)),
        Extremum::Min,
    )?;
    let base = eigen::default_config();
    let with = |alpha: Option<f64>, gamma: f64, init: Init| {
        let mut c = base.clone();
        c.inner.alpha = alpha;
        c.inner.gammas = vec![gamma];
        c.inner.init = init;
        c
    };
    let sym = Init::Uniform { lo: -1.0, hi: 1.0 };
    Ok(vec![
        ExampleSetup {
            key: "5.1",
            title: "Z-eigenpairs, order 4, dimension 3 (gamma = 1, alpha = ||A(theta)||_F)",
            problem: z.clone(),
            config: with(None, 1.0, sym.clone()),
            trials: 100,
        },
        ExampleSetup {
            key: "5.1",
            title: "Z-eigenpairs, order 4, dimension 3 (gamma = 1, alpha = 0.1)",
            problem: z,
            config: with(Some(0.1), 1.0, sym.clone()),
            trials: 100,
        },
        ExampleSetup {
            key: "5.2",
            title: "H-eigenpairs, order 6, dimension 4 (gamma = 3, alpha = 3)",
            problem: h,
            config: with(Some(3.0), 3.0, Init::Uniform { lo: 0.0, hi: 1.0 }),
            trials: 100,
        },
        ExampleSetup {
            key: "5.3",
            title: "D-eigenpairs, order 4, dimension 3 (gamma = 1, alpha = 10)",
            problem: d,
            config: with(Some(10.0), 1.0, sym),
            trials: 80,
        },
    ])
}

#[derive(Serialize)]
struct ExampleBlock<'a> {
    example: &'static str,
    title: &'static str,
    report: &'a MultiStartReport,
}

fn cmd_examples(a: &ExamplesArgs, out: &mut dyn Write) -> Result<i32> {
    let wanted = |key: &str| match a.which {
        Which::All => true,
        Which::Z => key == "5.1",
        Which::H => key == "5.2",
        Which::D => key == "5.3",
    };
    let mut reports = Vec::new();
    for setup in example_setups()?.into_iter().filter(|s| wanted(s.key)) {
        let mut config = setup.config.clone();
        let mut opts = MultiStart {
            trials: setup.trials,
            ..MultiStart::default()
        };
        apply_solver(&mut config, &mut opts, &a.solver)?;
        let mut report = eigen::solve_multistart(&setup.problem, &opts, &config)?;
        reverify(&mut report);
        reports.push((setup, report));
    }
    let blocks: Vec<ExampleBlock> = reports
        .iter()
        .map(|(s, r)| ExampleBlock {
            example: s.key,
            title: s.title,
            report: r,
        })
        .collect();
    let json = serde_json::to_string_pretty(&blocks).expect("plain data serializes") + "\n";
    if let Some(path) = &a.sidecar {
        let mut f = create(path)?;
        f.write_all(json.as_bytes())?;
        f.flush()?;
    }
    match a.format {
        Format::Json => out.write_all(json.as_bytes())?,
        format => {
            for (i, (s, r)) in reports.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                if format == Format::Table {
                    writeln!(out, "Example {}: {}", s.key, s.title)?;
                } else {
                    writeln!(out, "# example {}: {}", s.key, s.title)?;
                }
                out.write_all(render_report(r, format).as_bytes())?;
            }
        }
    }
    Ok(if reports.iter().all(|(_, r)| !r.pairs.is_empty()) {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    })
}

/// One result row of the trust-region command.
#[derive(Debug, Clone, Serialize)]
pub struct TrRow {
    pub n: usize,
    pub delta: f64,
    pub iters: usize,
    pub inner_iters: usize,
    pub lambda: f64,
    pub value: f64,
    pub grad_norm: f64,
    pub proj_min_eig: f64,
    pub proj_pd: bool,
    pub converged: bool,
    #[serde(skip)]
    pub seconds: f64,
}

fn tr_row(poly: &TaylorPoly, delta: f64, r: &BoundaryResult, seconds: f64) -> Result<TrRow> {
    let (proj_min_eig, proj_pd) = check_second_order(poly, &r.s, r.lambda)?;
    Ok(TrRow {
        n: poly.dim(),
        delta,
        iters: r.outer_iters,
        inner_iters: r.inner_iters,
        lambda: r.lambda,
        value: r.value,
        grad_norm: r.grad_lagrangian_norm,
        proj_min_eig,
        proj_pd,
        converged: r.converged,
        seconds,
    })
}

fn tr_table(rows: &[TrRow]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:>4} {:>7} {:>6} {:>14} {:>16} {:>11} {:>8} {:>9}",
        "n", "delta", "iters", "lambda", "value", "grad_norm", "proj_PD", "time_s"
    )
    .unwrap();
    for r in rows {
        writeln!(
            s,
            "{:>4} {:>7.3} {:>6} {:>14.6} {:>16.6} {:>11.3e} {:>8} {:>9.4}",
            r.n, r.delta, r.iters, r.lambda, r.value, r.grad_norm, r.proj_pd, r.seconds
        )
        .unwrap();
    }
    s
}

fn tr_csv(rows: &[TrRow]) -> String {
    let mut s = String::from("n,delta,iters,inner_iters,lambda,value,grad_norm,proj_min_eig,proj_PD,converged\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{:e},{:e},{:e},{:e},{},{}",
            r.n, r.delta, r.iters, r.inner_iters, r.lambda, r.value, r.grad_norm, r.proj_min_eig, r.proj_pd, r.converged
        )
        .unwrap();
    }
    s
}

fn cmd_trust_region(a: &TrustRegionArgs, out: &mut dyn Write) -> Result<i32> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let poly = match (&a.poly, a.random) {
        (Some(path), None) => read_poly(path).map_err(at(path))?,
        (None, Some(n)) => {
            let scales = CubicScales {
                a: a.scales[0],
                b: a.scales[1],
                c: a.scales[2],
            };
            random_cubic(n, scales, seed)?
        }
        _ => return Err(Error::Config("give exactly one of a polynomial file or --random N".into())),
    };
    let defaults = TrConfig::default();
    let config = TrConfig {
        gammas: a.gamma.clone().unwrap_or(defaults.gammas),
        alpha: a.alpha.unwrap_or(defaults.alpha),
        eps: a.eps.unwrap_or(defaults.eps),
        max_inner: a.max_inner.unwrap_or(defaults.max_inner),
        tol: a.tol.unwrap_or(defaults.tol),
        k_max: a.max_outer.unwrap_or(defaults.k_max),
        seed,
        s0: None,
        sign: if a.flip_sign {
            MultiplierSign::Flipped
        } else {
            MultiplierSign::Stationary
        },
        starts: a.starts,
    };
    let deltas = match a.delta_sweep {
        Some(sweep) => sweep_values(sweep),
        None => vec![a.delta],
    };
    let timed: Vec<(BoundaryResult, f64)> = deltas
        .par_iter()
        .map(|&d| {
            let start = Instant::now();
            solve_boundary(&poly, d, &config).map(|r| (r, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<TrRow> = deltas
        .iter()
        .zip(&timed)
        .map(|(&d, (r, t))| tr_row(&poly, d, r, *t))
        .collect::<Result<_>>()?;
    let results: Vec<BoundaryResult> = timed.into_iter().map(|(r, _)| r).collect();
    if let Some(path) = &a.history {
        let mut f = create(path)?;
        writeln!(f, "k,value")?;
        for (k, v) in results[0].history.iter().enumerate() {
            writeln!(f, "{},{:e}", k + 1, v)?;
        }
        f.flush()?;
    }
    if let Some(path) = &a.inner_history {
        let mut f = create(path)?;
        write_history(&results[0].inner_history, &mut f)?;
        f.flush()?;
    }
    match a.format {
        Format::Table => out.write_all(tr_table(&rows).as_bytes())?,
        Format::Csv => out.write_all(tr_csv(&rows).as_bytes())?,
        Format::Json => {
            #[derive(Serialize)]
            struct Entry<'a> {
                #[serde(flatten)]
                row: &'a TrRow,
                s: &'a [f64],
                history: &'a [f64],
            }
            let entries: Vec<Entry> = rows
                .iter()
                .zip(&results)
                .map(|(row, r)| Entry {
                    row,
                    s: &r.s,
                    history: &r.history,
                })
                .collect();
            out.write_all((serde_json::to_string_pretty(&entries).expect("plain data serializes") + "\n").as_bytes())?
        }
    }
    Ok(if rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let text = a
        .example2
        .as_ref()
        .map(|p| std::fs::read_to_string(p).map_err(|e| at(p)(e.into())))
        .transpose()?;
    let checks: Vec<Check> = verify::battery(text.as_deref())?;
    match a.format {
        Format::Json => out.write_all((serde_json::to_string_pretty(&checks).expect("plain data serializes") + "\n").as_bytes())?,
        Format::Csv => {
            writeln!(out, "check,status,detail")?;
            for c in &checks {
                writeln!(out, "\"{}\",{},\"{}\"", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail)?;
            }
        }
        Format::Table => {
            for c in &checks {
                writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
        }
    }
    Ok(if checks.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("-1:1").unwrap(), (-1.0, 1.0));
        assert!(parse_range("1:1").is_err());
        assert_eq!(sweep_values(parse_sweep("1:10:1").unwrap()).len(), 10);
        assert_eq!(sweep_values((0.5, 1.0, 0.25)), vec![0.5, 0.75, 1.0]);
        assert!(parse_sweep("0:2:1").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Denominator("x".into())), EXIT_INVALID_B);
        assert_eq!(exit_code(&Error::Parse { line: 3, message: "x".into() }), EXIT_INPUT);
    }
}
