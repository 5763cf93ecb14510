//! Dinkelbach iteration for `min f(x) / g(x)` over the unit sphere, with
//! `f = A x^d` and `g = B x^d`.
//!
//! Each outer step fixes `theta`, minimizes `f - theta g` with PAM and
//! replaces `theta` by the ratio at the minimizer. The parametric minimum
//! `F(theta)` is nonpositive at every `theta` that is itself a ratio, and
//! vanishes exactly at the optimal ratio.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pam::{self, Init, PamConfig, PamResult};
use crate::tensor::{axpy, BOperator, MultilinearForm, SymTensor};

/// Number of sphere samples used to check that the denominator is positive.
pub const POSITIVITY_SAMPLES: usize = 100;

#[derive(Debug, Clone)]
pub struct FractionalProblem {
    numerator: SymTensor,
    denominator: BOperator,
}

/// Seeded points drawn uniformly on the unit sphere.
pub fn sphere_samples(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let x: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = pam::norm(&x);
            if n > 1e-12 {
                break x.into_iter().map(|v| v / n).collect();
            }
        })
        .collect()
}

/// Fails with `Denominator` unless `b` is positive on seeded sphere samples.
pub fn check_positive(b: &BOperator, seed: u64) -> Result<()> {
    for x in sphere_samples(b.dim(), POSITIVITY_SAMPLES, seed) {
        let g = b.apply_full(&x)?;
        if !(g > 0.0) {
            return Err(Error::Denominator(format!(
                "B x^m = {g:.6e} at a sampled unit vector"
            )));
        }
    }
    Ok(())
}

impl FractionalProblem {
    pub fn new(numerator: SymTensor, denominator: BOperator) -> Result<Self> {
        let d = numerator.order();
        if denominator.order() != d {
            return Err(Error::Dim {
                expected: d,
                got: denominator.order(),
            });
        }
        if denominator.dim() != numerator.dim() {
            return Err(Error::Dim {
                expected: numerator.dim(),
                got: denominator.dim(),
            });
        }
        if d % 2 == 1 {
            return Err(Error::Domain(format!("degree must be even, got {d}")));
        }
        check_positive(&denominator, 0)?;
        Ok(FractionalProblem {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &SymTensor {
        &self.numerator
    }

    pub fn denominator(&self) -> &BOperator {
        &self.denominator
    }

    pub fn degree(&self) -> usize {
        self.numerator.order()
    }

    pub fn dim(&self) -> usize {
        self.numerator.dim()
    }

    /// `f(x) / g(x)`; scale invariant.
    pub fn ratio(&self, x: &[f64]) -> Result<f64> {
        let g = self.denominator.apply_full(x)?;
        if !(g > 0.0) {
            return Err(Error::Denominator(format!("g(x) = {g:.6e}")));
        }
        Ok(self.numerator.apply_full(x)? / g)
    }
}

/// `f(x) - theta g(x)` at `x / ||x||`.
pub fn f_theta(problem: &FractionalProblem, theta: f64, x: &[f64]) -> Result<f64> {
    let n = pam::norm(x);
    let unit: Vec<f64> = x.iter().map(|v| v / n).collect();
    Ok(problem.numerator.apply_full(&unit)? - theta * problem.denominator.apply_full(&unit)?)
}

#[derive(Debug, Clone)]
pub struct DinkelbachConfig {
    pub tol: f64,
    pub k_max: usize,
    pub inner: PamConfig,
    pub x0: Option<Vec<f64>>,
}

impl Default for DinkelbachConfig {
    fn default() -> Self {
        DinkelbachConfig {
            tol: 1e-3,
            k_max: 50,
            inner: PamConfig::default(),
            x0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub theta: f64,
    pub f_theta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DinkelbachResult {
    pub theta: f64,
    pub x: Vec<f64>,
    /// Number of ratio updates performed, counting the initial ratio when the
    /// first parametric solve already certifies it.
    pub outer_iters: usize,
    /// Parametric solves performed, including the certifying one.
    pub solves: usize,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    /// Whether the last inner solve met its own stopping rule.
    pub inner_converged: bool,
    pub inner_iters: usize,
    pub retries: usize,
}

pub fn write_trace(trace: &[TraceRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "k,theta,F_theta")?;
    for r in trace {
        writeln!(out, "{},{:e},{:e}", r.k, r.theta, r.f_theta)?;
    }
    Ok(())
}

fn unit(x: &[f64]) -> Vec<f64> {
    let n = pam::norm(x);
    x.iter().map(|v| v / n).collect()
}

pub fn dinkelbach_solve(problem: &FractionalProblem, config: &DinkelbachConfig) -> Result<DinkelbachResult> {
    if !(config.tol > 0.0) {
        return Err(Error::Config(format!("tol must be positive, got {}", config.tol)));
    }
    if config.k_max == 0 {
        return Err(Error::Config("k_max must be positive".into()));
    }
    let d = problem.degree();
    let n = problem.dim();
    let sphere = pam::Geometry::Sphere(vec![1.0; d]);

    // one random start shared by all blocks, unless blocks are given explicitly
    let first_blocks = match (&config.x0, &config.inner.init) {
        (Some(x0), _) => pam::initial_blocks(&sphere, d, n, &Init::Given(vec![x0.clone(); d]), config.inner.seed)?,
        (None, Init::Given(blocks)) => pam::initial_blocks(&sphere, d, n, &Init::Given(blocks.clone()), config.inner.seed)?,
        (None, init) => {
            let x0 = pam::initial_blocks(&sphere, 1, n, init, config.inner.seed)?.remove(0);
            vec![x0; d]
        }
    };
    let mut theta = problem.ratio(&first_blocks[0])?;
    let mut x = first_blocks[0].clone();
    let mut trace = Vec::new();
    let mut inner_iters = 0;
    let mut inner_converged = false;
    let mut converged = false;
    let mut retries = 0;
    let mut solves = 0;

    for k in 1..=config.k_max {
        let shifted = axpy(&problem.numerator, &problem.denominator, theta)?;
        let blocks = if k == 1 {
            first_blocks.clone()
        } else {
            vec![x.clone(); d]
        };
        let mut inner = PamConfig {
            init: Init::Given(blocks),
            ..config.inner.clone()
        };
        let mut result: PamResult = pam::pam_solve(&shifted, &inner)?;
        inner_iters += result.iterations;
        let mut fk = f_theta(problem, theta, &result.v)?;
        if fk >= config.tol {
            // restart from the same point with a weight that makes the shifted form concave
            let weight = (d - 1) as f64 * shifted.frobenius_norm();
            inner.alpha = Some(inner.alpha.map_or(weight, |a| a.max(weight)));
            let again = pam::pam_solve(&shifted, &inner)?;
            inner_iters += again.iterations;
            retries += 1;
            let f_again = f_theta(problem, theta, &again.v)?;
            if f_again < fk {
                result = again;
                fk = f_again;
            }
        }
        solves = k;
        inner_converged = result.converged;
        x = unit(&result.v);
        trace.push(TraceRow {
            k,
            theta,
            f_theta: fk,
        });
        if fk.abs() < config.tol {
            converged = true;
            break;
        }
        if fk > 0.0 {
            // the inner solver could not certify descent even after a restart
            break;
        }
        theta = problem.ratio(&x)?;
    }

    Ok(DinkelbachResult {
        theta,
        x,
        outer_iters: solves.saturating_sub(1).max(1),
        solves,
        trace,
        converged,
        inner_converged,
        inner_iters,
        retries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> SymTensor {
        SymTensor::from_class_fn(4, 3, |c| ((c[0] + 2 * c[1] + 3 * c[2] + 5 * c[3]) as f64 * 0.7).sin()).unwrap()
    }

    #[test]
    fn f_theta_vanishes_for_equal_forms() {
        let a = quartic();
        let b = SymTensor::from_class_fn(4, 3, |c| if c.iter().all(|&i| i == c[0]) { 2.0 } else { 0.1 }).unwrap();
        let p = FractionalProblem::new(a.clone(), BOperator::Dense(b.clone())).unwrap();
        let x = [0.2, -0.5, 0.9];
        assert!((f_theta(&p, 0.0, &x).unwrap() - a.apply_full(&unit(&x)).unwrap()).abs() < 1e-15);
        let q = FractionalProblem::new(b.clone(), BOperator::Dense(b)).unwrap();
        assert!(f_theta(&q, 1.0, &x).unwrap().abs() < 1e-15);
    }

    #[test]
    fn equal_forms_stop_after_one_solve() {
        let b = SymTensor::from_class_fn(4, 2, |c| if c.iter().all(|&i| i == c[0]) { 1.0 } else { 0.2 }).unwrap();
        let p = FractionalProblem::new(b.clone(), BOperator::Dense(b)).unwrap();
        let r = dinkelbach_solve(&p, &DinkelbachConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.outer_iters, 1);
        assert_eq!(r.solves, 1);
        assert!((r.theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_is_monotone() {
        let p = FractionalProblem::new(quartic(), BOperator::h_diagonal(4, 3).unwrap()).unwrap();
        for seed in 0..10 {
            let cfg = DinkelbachConfig {
                inner: PamConfig {
                    seed,
                    ..PamConfig::default()
                },
                ..DinkelbachConfig::default()
            };
            let r = dinkelbach_solve(&p, &cfg).unwrap();
            assert!(r.converged);
            for w in r.trace.windows(2) {
                assert!(w[1].theta <= w[0].theta + 1e-9);
                assert!(w[1].f_theta >= w[0].f_theta - 1e-9);
            }
        }
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let p = FractionalProblem::new(quartic(), BOperator::h_diagonal(4, 3).unwrap()).unwrap();
        let x = [0.3, -0.4, 0.5];
        let r = p.ratio(&x).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let big: Vec<f64> = x.iter().map(|v| 3.5 * v).collect();
        assert!((p.ratio(&neg).unwrap() - r).abs() < 1e-12);
        assert!((p.ratio(&unit(&big)).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn indefinite_denominator_is_rejected() {
        let b = SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![2, 2], -1.0)]).unwrap();
        let err = FractionalProblem::new(b.clone(), BOperator::Dense(b));
        assert!(matches!(err, Err(Error::Denominator(_))));
    }

    #[test]
    fn odd_degree_is_rejected() {
        let a = SymTensor::zeros(3, 2).unwrap();
        let b = BOperator::h_diagonal(3, 2).unwrap();
        assert!(FractionalProblem::new(a, b).is_err());
    }
}
