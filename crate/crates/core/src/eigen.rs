//! Extremal generalized eigenpairs `A x^(m-1) = lambda B x^(m-1)`.
//!
//! The smallest eigenvalue is the minimum of the ratio `A x^m / B x^m` on the
//! unit sphere, which the Dinkelbach driver computes. Largest eigenvalues are
//! found by minimizing the ratio for `-A`.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dinkelbach::{dinkelbach_solve, DinkelbachConfig, FractionalProblem};
use crate::error::{Error, Result};
use crate::pam::{self, Init};
use crate::tensor::{BOperator, MultilinearForm, SymTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Z,
    H,
    D,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct GeneralizedEigenProblem {
    a: SymTensor,
    kind: Kind,
    extremum: Extremum,
    fractional: FractionalProblem,
}

/// Pairs `a` with the right-hand operator implied by `kind`.
///
/// `Z` and `H` use the identity and diagonal operators and take no `b`;
/// `D` and `B` require a dense `b`.
pub fn build_problem(
    a: SymTensor,
    kind: Kind,
    b: Option<SymTensor>,
    extremum: Extremum,
) -> Result<GeneralizedEigenProblem> {
    let (m, n) = (a.order(), a.dim());
    let op = match (kind, b) {
        (Kind::Z, None) => BOperator::z_identity(m, n)?,
        (Kind::H, None) => BOperator::h_diagonal(m, n)?,
        (Kind::D | Kind::B, Some(b)) => BOperator::Dense(b),
        (Kind::Z | Kind::H, Some(_)) => {
            return Err(Error::Config(format!(
                "{kind:?}-eigenproblems use a built-in B; do not pass one"
            )))
        }
        (Kind::D | Kind::B, None) => {
            return Err(Error::Config(format!(
                "{kind:?}-eigenproblems need a dense B tensor"
            )))
        }
    };
    let numerator = match extremum {
        Extremum::Min => a.clone(),
        Extremum::Max => a.scaled(-1.0),
    };
    let fractional = FractionalProblem::new(numerator, op)?;
    Ok(GeneralizedEigenProblem {
        a,
        kind,
        extremum,
        fractional,
    })
}

impl GeneralizedEigenProblem {
    pub fn a(&self) -> &SymTensor {
        &self.a
    }

    pub fn b(&self) -> &BOperator {
        self.fractional.denominator()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn extremum(&self) -> Extremum {
        self.extremum
    }

    /// The ratio problem actually minimized.
    pub fn fractional(&self) -> &FractionalProblem {
        &self.fractional
    }
}

/// `A x^m / B x^m`.
pub fn rayleigh(problem: &GeneralizedEigenProblem, x: &[f64]) -> Result<f64> {
    let g = problem.b().apply_full(x)?;
    if g == 0.0 || !g.is_finite() {
        return Err(Error::Denominator(format!("B x^m = {g:e}")));
    }
    Ok(problem.a.apply_full(x)? / g)
}

/// `||A x^(m-1) - lambda B x^(m-1)||`.
pub fn residual(problem: &GeneralizedEigenProblem, lambda: f64, x: &[f64]) -> Result<f64> {
    let ga = problem.a.apply_gradient(x)?;
    let gb = problem.b().apply_gradient(x)?;
    Ok(ga
        .iter()
        .zip(&gb)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub residual: f64,
    pub trials_hit: usize,
    pub occurrence: f64,
    pub lambda_mean: f64,
    pub lambda_std: f64,
    pub mean_inner_iters: f64,
    pub std_inner_iters: f64,
    pub mean_outer_iters: f64,
    pub std_outer_iters: f64,
    #[serde(skip)]
    pub mean_seconds: f64,
    #[serde(skip)]
    pub std_seconds: f64,
}

/// Outcome of one start.
#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub lambda: f64,
    pub x: Vec<f64>,
    pub residual: f64,
    pub inner_iters: usize,
    pub outer_iters: usize,
    /// The outer loop met its tolerance.
    pub converged: bool,
    /// The last inner solve met its own stopping rule.
    pub inner_converged: bool,
    pub accepted: bool,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiStartReport {
    pub kind: Kind,
    pub extremum: Extremum,
    pub pairs: Vec<EigenPair>,
    pub trials: usize,
    pub seed: u64,
    pub cluster_tol: f64,
    pub tol: f64,
    pub non_converged: usize,
    #[serde(skip)]
    pub runs: Vec<Trial>,
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct MultiStart {
    pub trials: usize,
    pub base_seed: u64,
    pub cluster_tol: f64,
    /// Worker threads; `0` uses the rayon default and `1` runs in order.
    pub jobs: usize,
}

impl Default for MultiStart {
    fn default() -> Self {
        MultiStart {
            trials: 100,
            base_seed: 2024,
            cluster_tol: 1e-4,
            jobs: 0,
        }
    }
}

fn canonical_sign(x: &mut [f64]) {
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
    }
}

fn run_trial(
    problem: &GeneralizedEigenProblem,
    config: &DinkelbachConfig,
    index: usize,
    seed: u64,
) -> Trial {
    let start = Instant::now();
    let mut cfg = config.clone();
    cfg.inner.seed = seed;
    let outcome = dinkelbach_solve(&problem.fractional, &cfg).and_then(|r| {
        let x = r.x.clone();
        let lambda = rayleigh(problem, &x)?;
        let res = residual(problem, lambda, &x)?;
        Ok((r, x, lambda, res))
    });
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((r, mut x, lambda, res)) => {
            if problem.a.order() % 2 == 0 {
                canonical_sign(&mut x);
            }
            Trial {
                index,
                seed,
                lambda,
                x,
                residual: res,
                inner_iters: r.inner_iters,
                outer_iters: r.outer_iters,
                converged: r.converged,
                inner_converged: r.inner_converged,
                accepted: r.converged && r.inner_converged && res <= config.tol,
                seconds,
            }
        }
        Err(e) => {
            log::warn!("trial {index} (seed {seed}) failed: {e}");
            Trial {
                index,
                seed,
                lambda: f64::NAN,
                x: vec![f64::NAN; problem.a.dim()],
                residual: f64::NAN,
                inner_iters: 0,
                outer_iters: 0,
                converged: false,
                inner_converged: false,
                accepted: false,
                seconds,
            }
        }
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn summarize(problem: &GeneralizedEigenProblem, cluster: &[&Trial], trials: usize) -> Result<EigenPair> {
    let rep = cluster
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("clusters are nonempty");
    let lambda = rayleigh(problem, &rep.x)?;
    let (lambda_mean, lambda_std) = mean_std(cluster.iter().map(|t| t.lambda));
    let (mean_inner_iters, std_inner_iters) = mean_std(cluster.iter().map(|t| t.inner_iters as f64));
    let (mean_outer_iters, std_outer_iters) = mean_std(cluster.iter().map(|t| t.outer_iters as f64));
    let (mean_seconds, std_seconds) = mean_std(cluster.iter().map(|t| t.seconds));
    Ok(EigenPair {
        lambda,
        x: rep.x.clone(),
        residual: residual(problem, lambda, &rep.x)?,
        trials_hit: cluster.len(),
        occurrence: 100.0 * cluster.len() as f64 / trials as f64,
        lambda_mean,
        lambda_std,
        mean_inner_iters,
        std_inner_iters,
        mean_outer_iters,
        std_outer_iters,
        mean_seconds,
        std_seconds,
    })
}

/// Runs `opts.trials` independent Dinkelbach solves with seeds
/// `base_seed ^ index` and clusters the accepted eigenvalues.
pub fn solve_multistart(
    problem: &GeneralizedEigenProblem,
    opts: &MultiStart,
    config: &DinkelbachConfig,
) -> Result<MultiStartReport> {
    if opts.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if !(opts.cluster_tol > 0.0) {
        return Err(Error::Config("cluster_tol must be positive".into()));
    }
    let start = Instant::now();
    let work = |i: usize| run_trial(problem, config, i, opts.base_seed ^ i as u64);
    let runs: Vec<Trial> = if opts.jobs == 1 {
        (0..opts.trials).map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| (0..opts.trials).into_par_iter().map(work).collect())
    };

    let mut accepted: Vec<&Trial> = runs.iter().filter(|t| t.accepted).collect();
    accepted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.index.cmp(&b.index)));
    let mut pairs = Vec::new();
    let mut cluster: Vec<&Trial> = Vec::new();
    for t in accepted.iter().copied() {
        if let Some(last) = cluster.last() {
            if t.lambda - last.lambda >= opts.cluster_tol {
                pairs.push(summarize(problem, &cluster, opts.trials)?);
                cluster.clear();
            }
        }
        cluster.push(t);
    }
    if !cluster.is_empty() {
        pairs.push(summarize(problem, &cluster, opts.trials)?);
    }
    if problem.extremum == Extremum::Max {
        pairs.reverse();
    }
    let elapsed_seconds = start.elapsed().as_secs_f64();
    log::info!(
        "{} trials in {:.3} s ({} not converged)",
        opts.trials,
        elapsed_seconds,
        runs.len() - accepted.len()
    );
    Ok(MultiStartReport {
        kind: problem.kind,
        extremum: problem.extremum,
        pairs,
        trials: opts.trials,
        seed: opts.base_seed,
        cluster_tol: opts.cluster_tol,
        tol: config.tol,
        non_converged: runs.len() - accepted.len(),
        runs,
        elapsed_seconds,
    })
}

/// Default solver settings for a kind: `gamma = 1`, `alpha` from the
/// Frobenius norm, entries of the start drawn from `[-1, 1]`.
pub fn default_config() -> DinkelbachConfig {
    DinkelbachConfig {
        inner: pam::PamConfig {
            init: Init::Uniform { lo: -1.0, hi: 1.0 },
            ..pam::PamConfig::default()
        },
        ..DinkelbachConfig::default()
    }
}

fn format_vec(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

impl MultiStartReport {
    /// Aligned text table, one row per eigenvalue cluster.
    pub fn to_table(&self) -> String {
        let header = ["occ(%)", "lambda", "x", "inner its", "outer its", "cpu(s)"];
        let rows: Vec<[String; 6]> = self
            .pairs
            .iter()
            .map(|p| {
                [
                    format!("{:.2}", p.occurrence),
                    format!("{:.4}", p.lambda),
                    format!("±{}", format_vec(&p.x)),
                    format!("{:.1} ± {:.1}", p.mean_inner_iters, p.std_inner_iters),
                    format!("{:.2} ± {:.2}", p.mean_outer_iters, p.std_outer_iters),
                    format!("{:.3} ± {:.3}", p.mean_seconds, p.std_seconds),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join(" | ").trim_end().to_string()
        };
        let mut out = String::new();
        writeln!(out, "{}", line(header.to_vec())).unwrap();
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        writeln!(out, "{}", rule.join("-+-")).unwrap();
        for r in &rows {
            writeln!(out, "{}", line(r.iter().map(|s| s.as_str()).collect())).unwrap();
        }
        writeln!(
            out,
            "{} trials, seed {}, {} not converged",
            self.trials, self.seed, self.non_converged
        )
        .unwrap();
        out
    }

    /// Comma-separated rows without timing columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("occurrence,lambda,lambda_std,residual,x,mean_inner_iters,std_inner_iters,mean_outer_iters,std_outer_iters\n");
        for p in &self.pairs {
            let x: Vec<String> = p.x.iter().map(|v| format!("{v:e}")).collect();
            writeln!(
                out,
                "{},{:e},{:e},{:e},{},{},{},{},{}",
                p.occurrence,
                p.lambda,
                p.lambda_std,
                p.residual,
                x.join(";"),
                p.mean_inner_iters,
                p.std_inner_iters,
                p.mean_outer_iters,
                p.std_outer_iters
            )
            .unwrap();
        }
        out
    }
}
