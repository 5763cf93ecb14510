//! Built-in verification battery.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dinkelbach::{dinkelbach_solve, sphere_samples, DinkelbachConfig};
use crate::eigen::{self, build_problem, Extremum, Kind, MultiStart};
use crate::error::Result;
use crate::pam::{self, Init, PamConfig};
use crate::tensor::{parse_tensor, MultilinearForm, SymTensor};
use crate::trust_region::{self, homogenize, TaylorPoly};

pub const EXAMPLE2: &str = include_str!("../data/example2.tns");
pub const EXAMPLE3: &str = include_str!("../data/example3.tns");
pub const EXAMPLE4_A: &str = include_str!("../data/example4_A.tns");
pub const EXAMPLE4_B: &str = include_str!("../data/example4_B.tns");

/// Smallest Z-eigenvalue of the bundled fourth-order example.
pub const EXAMPLE2_MIN: f64 = -1.0954;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// Symmetric tensor with standard normal canonical entries.
pub fn random_tensor(order: usize, dim: usize, seed: u64) -> Result<SymTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SymTensor::from_class_fn(order, dim, |_| StandardNormal.sample(&mut rng))
}

fn diag(values: &[f64]) -> SymTensor {
    let entries = values.iter().enumerate().map(|(i, &v)| (vec![i + 1, i + 1], v));
    SymTensor::from_entries(2, values.len(), entries).expect("valid diagonal")
}

/// `(min over the sphere of x^T A x, min of x^T A y over two spheres)`; the
/// first from an eigendecomposition, the second from PAM with `alpha = 0`.
pub fn counterexample(a: &SymTensor) -> Result<(f64, f64)> {
    let n = a.dim();
    let m = DMatrix::from_fn(n, n, |i, j| a.get(&[i, j]).expect("in range"));
    let homogeneous = SymmetricEigen::new(m).eigenvalues.min();
    let mut best = f64::INFINITY;
    for seed in 0..10 {
        let cfg = PamConfig {
            alpha: Some(0.0),
            eps: 1e-12,
            seed,
            ..PamConfig::default()
        };
        let r = pam::pam_solve(a, &cfg)?;
        let blocks: Vec<&[f64]> = r.blocks.iter().map(|b| b.as_slice()).collect();
        best = best.min(a.multilinear_apply(&blocks)?);
    }
    Ok((homogeneous, best))
}

/// Exact Hessian of `A x^d - alpha ||x||^d` at `x`.
pub fn concavity_hessian(a: &SymTensor, alpha: f64, x: &[f64]) -> Result<DMatrix<f64>> {
    let (d, n) = (a.order(), a.dim());
    let nx = pam::norm(x);
    let mut e = vec![vec![0.0; n]; n];
    for (i, v) in e.iter_mut().enumerate() {
        v[i] = 1.0;
    }
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut blocks: Vec<&[f64]> = vec![x; d - 2];
            blocks.push(&e[i]);
            blocks.push(&e[j]);
            let mut v = (d * (d - 1)) as f64 * a.multilinear_apply(&blocks)?;
            let df = d as f64;
            if i == j {
                v -= alpha * df * nx.powi(d as i32 - 2);
            }
            if d > 2 {
                v -= alpha * df * (df - 2.0) * nx.powi(d as i32 - 4) * x[i] * x[j];
            }
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Largest Hessian eigenvalue over seeded sphere samples for
/// `alpha = factor * ||A||_F`, across `m in {2, 4}`, `n in {2, 3}` and
/// `instances` random tensors each.
pub fn concavity_max_eig(factor: f64, instances: u64, samples: usize) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for m in [2, 4] {
        for n in [2, 3] {
            for k in 0..instances {
                let a = random_tensor(m, n, 1000 * m as u64 + 100 * n as u64 + k)?;
                let alpha = factor * a.frobenius_norm();
                for x in sphere_samples(n, samples, k) {
                    let h = concavity_hessian(&a, alpha, &x)?;
                    worst = worst.max(SymmetricEigen::new(h).eigenvalues.max());
                }
            }
        }
    }
    Ok(worst)
}

/// Largest relative error of `T[(1, s)]^p = T_p(s)` over seeded polynomials.
pub fn homogenization_error(cases: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        let p = 2 + (k % 3) as usize;
        let n = 2 + (k % 7) as usize;
        let mut poly = TaylorPoly::new(n, p)?;
        random_terms(&mut poly, &mut rng, n, p)?;
        let s: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut lifted = vec![1.0];
        lifted.extend_from_slice(&s);
        let direct = poly.eval(&s)?;
        let tensor = homogenize(&poly).apply_full(&lifted)?;
        worst = worst.max((direct - tensor).abs() / direct.abs().max(1.0));
    }
    Ok(worst)
}

fn random_terms(poly: &mut TaylorPoly, rng: &mut ChaCha8Rng, n: usize, p: usize) -> Result<()> {
    // every exponent vector of total degree <= p
    fn walk(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            walk(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    walk(n, p, &mut Vec::new(), &mut all);
    for alpha in all {
        poly.add_term(&alpha, StandardNormal.sample(rng))?;
    }
    Ok(())
}

/// Largest relative error of Euler's identity `x . A x^(m-1) = A x^m` and of
/// central differences against `m A x^(m-1)` and the Taylor gradient.
pub fn gradient_error(cases: u64) -> Result<(f64, f64)> {
    let mut euler: f64 = 0.0;
    let mut fd: f64 = 0.0;
    let h = 1e-6;
    for k in 0..cases {
        let m = 2 + (k % 4) as usize;
        let n = 2 + (k % 3) as usize;
        let a = random_tensor(m, n, 7000 + k)?;
        let x = sphere_samples(n, 1, k).remove(0);
        let g = a.apply_gradient(&x)?;
        let f = a.apply_full(&x)?;
        euler = euler.max((pam::dot(&x, &g) - f).abs() / f.abs().max(1.0));
        for i in 0..n {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[i] += h;
            dn[i] -= h;
            let num = (a.apply_full(&up)? - a.apply_full(&dn)?) / (2.0 * h);
            let exact = m as f64 * g[i];
            fd = fd.max((num - exact).abs() / exact.abs().max(1.0));
        }
        let poly = trust_region::random_cubic(n, Default::default(), k)?;
        let s: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let gp = poly.gradient(&s)?;
        for i in 0..n {
            let mut up = s.clone();
            let mut dn = s.clone();
            up[i] += h;
            dn[i] -= h;
            let num = (poly.eval(&up)? - poly.eval(&dn)?) / (2.0 * h);
            fd = fd.max((num - gp[i]).abs() / gp[i].abs().max(1.0));
        }
    }
    Ok((euler, fd))
}

/// Multistart Z-eigen run on `a` with the settings of the fourth-order example.
pub fn example2_report(a: &SymTensor, trials: usize, alpha: Option<f64>) -> Result<eigen::MultiStartReport> {
    let problem = build_problem(a.clone(), Kind::Z, None, Extremum::Min)?;
    let mut config: DinkelbachConfig = eigen::default_config();
    config.inner.alpha = alpha;
    config.inner.init = Init::Uniform { lo: -1.0, hi: 1.0 };
    let opts = MultiStart {
        trials,
        ..MultiStart::default()
    };
    eigen::solve_multistart(&problem, &opts, &config)
}

/// Whether every Dinkelbach trace on `a` (Z-eigen settings, seeds
/// `0..trials`) has nonincreasing `theta` and nondecreasing `F(theta)`.
pub fn monotone_traces(a: &SymTensor, trials: u64) -> Result<bool> {
    let problem = build_problem(a.clone(), Kind::Z, None, Extremum::Min)?;
    for seed in 0..trials {
        let mut config = eigen::default_config();
        config.inner.seed = seed;
        let r = dinkelbach_solve(problem.fractional(), &config)?;
        let ok = r.trace.windows(2).all(|w| {
            w[1].theta <= w[0].theta + TRACE_SLACK && w[1].f_theta >= w[0].f_theta - TRACE_SLACK
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Slack for the trace monotonicity test.
pub const TRACE_SLACK: f64 = 1e-9;

/// Runs every check. `example2` replaces the bundled fourth-order tensor.
pub fn battery(example2: Option<&str>) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let (h1, m1) = counterexample(&diag(&[1.0, -2.0]))?;
    out.push(Check::new(
        "counterexample A1 = diag(1,-2)",
        (h1 + 2.0).abs() <= 1e-8 && (m1 + 2.0).abs() <= 1e-6,
        format!("homogeneous {h1:.6}, multilinear {m1:.6}"),
    ));
    let (h2, m2) = counterexample(&diag(&[2.0, 4.0]))?;
    out.push(Check::new(
        "counterexample A2 = diag(2,4)",
        (h2 - 2.0).abs() <= 1e-8 && (m2 + 4.0).abs() <= 1e-6,
        format!("homogeneous {h2:.6}, multilinear {m2:.6}"),
    ));

    let worst = concavity_max_eig(3.0, 5, 50)?;
    out.push(Check::new(
        "concavity at alpha = (d-1) ||A||_F",
        worst <= 1e-8,
        format!("max Hessian eigenvalue {worst:.3e}"),
    ));

    let herr = homogenization_error(100)?;
    out.push(Check::new(
        "homogenization identity",
        herr <= 1e-10,
        format!("max relative error {herr:.3e}"),
    ));

    let (euler, fd) = gradient_error(40)?;
    out.push(Check::new(
        "Euler and gradient identities",
        euler <= 1e-12 && fd <= 1e-5,
        format!("Euler {euler:.3e}, finite differences {fd:.3e}"),
    ));

    let a = parse_tensor(example2.unwrap_or(EXAMPLE2))?;
    let x = sphere_samples(a.dim(), 1, 3).remove(0);
    let blocks = vec![x.as_slice(); a.order()];
    let diagonal_gap = (a.multilinear_apply(&blocks)? - a.apply_full(&x)?).abs();
    let report = example2_report(&a, 20, None)?;
    let monotone = monotone_traces(&a, 20)?;
    let lowest = report.pairs.first().map(|p| p.lambda).unwrap_or(f64::NAN);
    out.push(Check::new(
        "example 2: homogeneous/multilinear diagonal and global minimum",
        diagonal_gap <= 1e-12 && monotone && (lowest - EXAMPLE2_MIN).abs() <= 5e-4,
        format!(
            "diagonal gap {diagonal_gap:.1e}, monotone traces {monotone}, lowest lambda {lowest:.4}"
        ),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concavity_hessian_matches_quadratic_form() {
        let a = diag(&[1.0, -2.0]);
        let h = concavity_hessian(&a, 0.5, &[0.6, 0.8]).unwrap();
        assert!((h[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((h[(1, 1)] + 5.0).abs() < 1e-14);
        assert_eq!(h[(0, 1)], 0.0);
    }

    #[test]
    fn counterexamples_show_the_gap() {
        let (h, m) = counterexample(&diag(&[2.0, 4.0])).unwrap();
        assert!((h - 2.0).abs() < 1e-12);
        assert!((m + 4.0).abs() < 1e-6);
    }
}
