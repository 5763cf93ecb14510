//! Minimizing a Taylor model on the trust-region boundary `||s|| = delta`.
//!
//! The model `T_p(s) = sum_a f_a s^a` is homogenized into an order-`p`
//! symmetric tensor over `(1, s)`, and PAM runs over `p` blocks of the form
//! `(1, w)` with `||w|| = delta`. An outer loop repeats warm-started PAM
//! solves until the Lagrangian gradient `grad T_p(s) + lambda s` is small.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dinkelbach::sphere_samples;
use crate::error::{Error, Result};
use crate::pam::{self, Geometry, HistoryRow, Problem};
use crate::tensor::{factorial, MultilinearForm, SymTensor};

/// A polynomial in `n` variables of total degree at most `p`, keyed by
/// exponent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPoly {
    n: usize,
    p: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

fn monomial(s: &[f64], a: &[usize]) -> f64 {
    s.iter().zip(a).map(|(x, &k)| x.powi(k as i32)).product()
}

impl TaylorPoly {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Domain(format!("need n >= 1 and p >= 1, got n = {n}, p = {p}")));
        }
        Ok(TaylorPoly {
            n,
            p,
            coeffs: BTreeMap::new(),
        })
    }

    /// Adds `coeff * s^alpha`.
    pub fn add_term(&mut self, alpha: &[usize], coeff: f64) -> Result<()> {
        if alpha.len() != self.n {
            return Err(Error::Dim {
                expected: self.n,
                got: alpha.len(),
            });
        }
        let degree: usize = alpha.iter().sum();
        if degree > self.p {
            return Err(Error::Domain(format!("term of degree {degree} exceeds p = {}", self.p)));
        }
        if !coeff.is_finite() {
            return Err(Error::Domain("coefficient is not finite".into()));
        }
        *self.coeffs.entry(alpha.to_vec()).or_insert(0.0) += coeff;
        Ok(())
    }

    /// `f0 + g^T s + 1/2 H[s]^2 + 1/6 T[s]^3`; `h` must be symmetric.
    pub fn from_cubic(f0: f64, g: &[f64], h: &DMatrix<f64>, t: &SymTensor) -> Result<Self> {
        let n = g.len();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::Dim {
                expected: n,
                got: h.nrows(),
            });
        }
        if t.order() != 3 || t.dim() != n {
            return Err(Error::Dim {
                expected: n,
                got: t.dim(),
            });
        }
        let mut poly = TaylorPoly::new(n, 3)?;
        poly.add_term(&vec![0; n], f0)?;
        let mut alpha = vec![0; n];
        for i in 0..n {
            alpha[i] += 1;
            poly.add_term(&alpha, g[i])?;
            for j in i..n {
                alpha[j] += 1;
                let mult = if i == j { 1.0 } else { 2.0 };
                poly.add_term(&alpha, 0.5 * mult * h[(i, j)])?;
                alpha[j] -= 1;
            }
            alpha[i] -= 1;
        }
        for (class, v) in t.entries() {
            let mut alpha = vec![0; n];
            for &i in class {
                alpha[i] += 1;
            }
            let mult = 6.0 / alpha.iter().map(|&k| factorial(k)).product::<f64>();
            poly.add_term(&alpha, mult * v / 6.0)?;
        }
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.coeffs.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    fn check(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.n {
            return Err(Error::Dim {
                expected: self.n,
                got: s.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, s: &[f64]) -> Result<f64> {
        self.check(s)?;
        Ok(self.coeffs.iter().map(|(a, c)| c * monomial(s, a)).sum())
    }

    pub fn gradient(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.check(s)?;
        let mut g = vec![0.0; self.n];
        for (a, c) in &self.coeffs {
            for i in 0..self.n {
                if a[i] == 0 {
                    continue;
                }
                let mut b = a.clone();
                b[i] -= 1;
                g[i] += c * a[i] as f64 * monomial(s, &b);
            }
        }
        Ok(g)
    }

    pub fn hessian(&self, s: &[f64]) -> Result<DMatrix<f64>> {
        self.check(s)?;
        let n = self.n;
        let mut h = DMatrix::zeros(n, n);
        for (a, c) in &self.coeffs {
            for i in 0..n {
                if a[i] == 0 {
                    continue;
                }
                let mut b = a.clone();
                b[i] -= 1;
                let ci = c * a[i] as f64;
                for j in i..n {
                    if b[j] == 0 {
                        continue;
                    }
                    let mut e = b.clone();
                    e[j] -= 1;
                    let v = ci * b[j] as f64 * monomial(s, &e);
                    h[(i, j)] += v;
                    if i != j {
                        h[(j, i)] += v;
                    }
                }
            }
        }
        Ok(h)
    }
}

/// The order-`p`, dimension-`n + 1` symmetric tensor `T` with
/// `T[(1, s)]^p = T_p(s)`; index 0 is the homogenizing coordinate.
pub fn homogenize(poly: &TaylorPoly) -> SymTensor {
    let p = poly.p;
    let mut t = SymTensor::zeros(p, poly.n + 1).expect("positive shape");
    for (a, &c) in &poly.coeffs {
        let degree: usize = a.iter().sum();
        let mut index = vec![0; p - degree];
        for (i, &k) in a.iter().enumerate() {
            index.extend(std::iter::repeat_n(i + 1, k));
        }
        let weight = factorial(p - degree) * a.iter().map(|&k| factorial(k)).product::<f64>() / factorial(p);
        t.set(&index, weight * c).expect("index within shape");
    }
    t
}

/// `grad T_p(s) + lambda s`.
pub fn lagrangian_grad(poly: &TaylorPoly, s: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let mut g = poly.gradient(s)?;
    for (gi, si) in g.iter_mut().zip(s) {
        *gi += lambda * si;
    }
    Ok(g)
}

/// Orthonormal basis of the complement of `s`, as the last `n - 1` columns
/// of the Householder reflector that maps `s / ||s||` to `e_1`.
fn complement_basis(s: &[f64]) -> DMatrix<f64> {
    let n = s.len();
    let norm = pam::norm(s);
    let mut v = DVector::from_iterator(n, s.iter().map(|x| x / norm));
    // reflect towards -e_1 when s_1 > 0 to avoid cancellation
    let sign = if v[0] > 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vv = v.dot(&v);
    let q = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    q.columns(1, n - 1).into_owned()
}

/// Smallest eigenvalue of the Lagrangian Hessian restricted to the complement
/// of `s`, and whether it is positive (above `1e-10`).
pub fn check_second_order(poly: &TaylorPoly, s: &[f64], lambda: f64) -> Result<(f64, bool)> {
    let n = poly.n;
    if pam::norm(s) == 0.0 {
        return Err(Error::Domain("second-order check needs s != 0".into()));
    }
    if n == 1 {
        return Ok((f64::INFINITY, true));
    }
    let h = poly.hessian(s)? + DMatrix::identity(n, n) * lambda;
    let basis = complement_basis(s);
    let projected = basis.transpose() * h * &basis;
    let min = SymmetricEigen::new(projected).eigenvalues.min();
    Ok((min, min > 1e-10))
}

/// Number of negative eigenvalues of the full Lagrangian Hessian.
pub fn negative_directions(poly: &TaylorPoly, s: &[f64], lambda: f64) -> Result<usize> {
    let n = poly.n;
    let h = poly.hessian(s)? + DMatrix::identity(n, n) * lambda;
    Ok(SymmetricEigen::new(h).eigenvalues.iter().filter(|&&e| e < -1e-10).count())
}

/// Multiplier update convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplierSign {
    /// `lambda = -s^T grad T_p(s) / delta^2`, which zeroes `grad T_p + lambda s`
    /// at boundary stationary points.
    #[default]
    Stationary,
    /// `lambda = s^T grad T_p(s) / delta^2`, the opposite sign.
    Flipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrConfig {
    pub gammas: Vec<f64>,
    pub alpha: f64,
    /// PAM stopping threshold on the change of the best block value.
    pub eps: f64,
    pub max_inner: usize,
    /// Threshold on the Lagrangian gradient norm.
    pub tol: f64,
    pub k_max: usize,
    pub seed: u64,
    /// Starting step; zero when `None`. Need not lie on the boundary.
    pub s0: Option<Vec<f64>>,
    pub sign: MultiplierSign,
    /// Number of starts: `s0`, then seeded random boundary points. The
    /// converged result with the smallest model value is returned.
    pub starts: usize,
}

impl Default for TrConfig {
    fn default() -> Self {
        TrConfig {
            gammas: vec![8.0],
            alpha: 1.0,
            eps: 1e-9,
            max_inner: 10_000,
            tol: 1e-5,
            k_max: 200,
            seed: 0,
            s0: None,
            sign: MultiplierSign::Stationary,
            starts: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryResult {
    pub s: Vec<f64>,
    pub lambda: f64,
    pub value: f64,
    pub grad_lagrangian_norm: f64,
    pub inner_iters: usize,
    pub outer_iters: usize,
    pub converged: bool,
    pub degenerate_updates: usize,
    /// Index of the start that produced this result; 0 is `s0`.
    pub start: usize,
    /// Inner solves repeated with the larger regularization weight.
    pub retries: usize,
    /// `T_p(s_k)` after each outer step.
    pub history: Vec<f64>,
    /// PAM rows of every inner solve, in order.
    #[serde(skip)]
    pub inner_history: Vec<HistoryRow>,
}

/// Relative slack under which a step counts as no worse than the current one.
const ROUNDOFF: f64 = 1e-12;

fn multiplier(poly: &TaylorPoly, s: &[f64], delta: f64, sign: MultiplierSign) -> Result<f64> {
    let g = poly.gradient(s)?;
    let v = pam::dot(s, &g) / (delta * delta);
    Ok(match sign {
        MultiplierSign::Stationary => -v,
        MultiplierSign::Flipped => v,
    })
}

pub fn solve_boundary(poly: &TaylorPoly, delta: f64, config: &TrConfig) -> Result<BoundaryResult> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Config(format!("delta must be positive, got {delta}")));
    }
    if config.k_max == 0 {
        return Err(Error::Config("k_max must be positive".into()));
    }
    if !(config.tol > 0.0) || !(config.eps > 0.0) {
        return Err(Error::Config("tol and eps must be positive".into()));
    }
    let n = poly.n;
    let p = poly.p;
    let gammas = match config.gammas.len() {
        1 => vec![config.gammas[0]; p],
        len if len == p => config.gammas.clone(),
        len => return Err(Error::Config(format!("gammas: expected 1 or {p} values, got {len}"))),
    };
    if gammas.iter().any(|g| !(*g >= 0.0)) || !(config.alpha >= 0.0) {
        return Err(Error::Config("gammas and alpha must be nonnegative".into()));
    }
    if config.starts == 0 {
        return Err(Error::Config("starts must be positive".into()));
    }
    let first = match &config.s0 {
        Some(s) => {
            poly.check(s)?;
            s.clone()
        }
        None => vec![0.0; n],
    };
    let tensor = homogenize(poly);
    let mut best: Option<BoundaryResult> = None;
    for (start, s0) in std::iter::once(first)
        .chain(sphere_samples(n, config.starts - 1, config.seed).into_iter().map(|x| x.iter().map(|v| delta * v).collect()))
        .enumerate()
    {
        let mut r = solve_from(poly, &tensor, delta, config, &gammas, s0)?;
        r.start = start;
        let better = match &best {
            None => true,
            Some(b) => (r.converged, -r.value) > (b.converged, -b.value),
        };
        if better {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

fn solve_from(
    poly: &TaylorPoly,
    tensor: &SymTensor,
    delta: f64,
    config: &TrConfig,
    gammas: &[f64],
    s0: Vec<f64>,
) -> Result<BoundaryResult> {
    let n = poly.n;
    let p = poly.p;
    let problem = Problem {
        op: tensor,
        alpha: config.alpha,
        gammas: gammas.to_vec(),
        geometry: Geometry::Pinned(delta),
        eps: config.eps,
        max_iter: config.max_inner,
        seed: config.seed,
    };

    let retry_problem = Problem {
        alpha: config.alpha.max((p - 1) as f64 * tensor.frobenius_norm()),
        gammas: problem.gammas.clone(),
        geometry: Geometry::Pinned(delta),
        ..problem
    };

    let lift = |s: &[f64]| {
        let mut b = Vec::with_capacity(n + 1);
        b.push(1.0);
        b.extend_from_slice(s);
        b
    };
    let mut blocks = vec![lift(&s0); p];
    let mut s = s0.clone();
    let mut lambda = 0.0;
    let mut gnorm = pam::norm(&lagrangian_grad(poly, &s, lambda)?);
    let mut value = poly.eval(&s)?;
    let mut history = Vec::new();
    let mut inner_history = Vec::new();
    let mut inner_iters = 0;
    let mut degenerate_updates = 0;
    let mut outer_iters = 0;
    let mut retries = 0;
    let mut converged = false;

    for _ in 0..config.k_max {
        if gnorm < config.tol && outer_iters > 0 {
            converged = true;
            break;
        }
        let r = pam::run(&problem, blocks.clone())?;
        inner_iters += r.iterations;
        degenerate_updates += r.degenerate_updates;
        inner_history.extend_from_slice(&r.history);
        outer_iters += 1;

        let mut candidate = r.v[1..].to_vec();
        let mut candidate_value = poly.eval(&candidate)?;
        let slack = ROUNDOFF * value.abs().max(1.0);
        if outer_iters > 1 && candidate_value > value - slack {
            // no progress: the blocks may have settled apart, so redo the step with a
            // weight that keeps them together
            let again = pam::run(&retry_problem, blocks)?;
            inner_iters += again.iterations;
            degenerate_updates += again.degenerate_updates;
            inner_history.extend_from_slice(&again.history);
            retries += 1;
            let w = again.v[1..].to_vec();
            let wv = poly.eval(&w)?;
            if wv < candidate_value {
                candidate = w;
                candidate_value = wv;
            }
        }
        if outer_iters == 1 || candidate_value <= value + slack {
            s = candidate;
            value = candidate_value;
        }
        if !value.is_finite() {
            return Err(Error::Numerical { iteration: outer_iters });
        }
        history.push(value);
        lambda = multiplier(poly, &s, delta, config.sign)?;
        gnorm = pam::norm(&lagrangian_grad(poly, &s, lambda)?);
        blocks = vec![lift(&s); p];
    }
    if gnorm < config.tol {
        converged = true;
    }

    Ok(BoundaryResult {
        s,
        lambda,
        value,
        grad_lagrangian_norm: gnorm,
        inner_iters,
        outer_iters,
        converged,
        degenerate_updates,
        retries,
        start: 0,
        history,
        inner_history,
    })
}

/// Solves on each radius independently.
pub fn delta_sweep(poly: &TaylorPoly, deltas: &[f64], config: &TrConfig) -> Result<Vec<BoundaryResult>> {
    deltas.par_iter().map(|&d| solve_boundary(poly, d, config)).collect()
}

/// Scales for the random cubic `a * randn`, `b * symm(randn)`, `c * symm(randn)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicScales {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for CubicScales {
    fn default() -> Self {
        CubicScales {
            a: 80.0,
            b: 80.0,
            c: 80.0,
        }
    }
}

/// Seeded cubic model with `f0 = 0`. `H` and `T` are permutation averages of
/// standard normal arrays.
pub fn random_cubic(n: usize, scales: CubicScales, seed: u64) -> Result<TaylorPoly> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let g: Vec<f64> = (0..n).map(|_| scales.a * normal()).collect();
    let raw_h = DMatrix::from_fn(n, n, |_, _| normal());
    let h = (&raw_h + raw_h.transpose()) * (0.5 * scales.b);
    let raw_t: Vec<f64> = (0..n * n * n).map(|_| normal()).collect();
    let at = |i: usize, j: usize, k: usize| raw_t[(i * n + j) * n + k];
    let t = SymTensor::from_class_fn(3, n, |c| {
        let (i, j, k) = (c[0], c[1], c[2]);
        let sum = at(i, j, k) + at(i, k, j) + at(j, i, k) + at(j, k, i) + at(k, i, j) + at(k, j, i);
        scales.c * sum / 6.0
    })?;
    TaylorPoly::from_cubic(0.0, &g, &h, &t)
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<usize>,
    coeff: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct PolyJson {
    n: usize,
    p: usize,
    #[serde(default)]
    terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    H: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    T: Option<Vec<Vec<Vec<f64>>>>,
}

fn json_err(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        message: message.into(),
    }
}

/// Reads `{"n", "p", "terms": [{"alpha", "coeff"}], "f0"?, "g"?, "H"?, "T"?}`.
/// Dense blocks are only accepted for `p = 3` and are added to the terms.
pub fn parse_poly(text: &str) -> Result<TaylorPoly> {
    let raw: PolyJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let n = raw.n;
    let mut poly = TaylorPoly::new(n, raw.p)?;
    for term in &raw.terms {
        poly.add_term(&term.alpha, term.coeff)?;
    }
    let dense = raw.f0.is_some() || raw.g.is_some() || raw.H.is_some() || raw.T.is_some();
    if dense {
        if raw.p != 3 {
            return Err(json_err("dense f0/g/H/T blocks require p = 3"));
        }
        let g = raw.g.unwrap_or_else(|| vec![0.0; n]);
        let h_rows = raw.H.unwrap_or_else(|| vec![vec![0.0; n]; n]);
        if g.len() != n || h_rows.len() != n || h_rows.iter().any(|r| r.len() != n) {
            return Err(json_err("g and H must have dimension n"));
        }
        let h = DMatrix::from_fn(n, n, |i, j| h_rows[i][j]);
        if (&h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) {
            return Err(json_err("H must be symmetric"));
        }
        let t = match raw.T {
            Some(t) => {
                if t.len() != n || t.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
                    return Err(json_err("T must be n x n x n"));
                }
                let mut perms_ok = true;
                let sym = SymTensor::from_class_fn(3, n, |c| {
                    let v = t[c[0]][c[1]][c[2]];
                    let others = [t[c[0]][c[2]][c[1]], t[c[1]][c[0]][c[2]], t[c[2]][c[1]][c[0]]];
                    if others.iter().any(|o| (o - v).abs() > 1e-12 * v.abs().max(1.0)) {
                        perms_ok = false;
                    }
                    v
                })?;
                if !perms_ok {
                    return Err(json_err("T must be symmetric"));
                }
                sym
            }
            None => SymTensor::zeros(3, n)?,
        };
        let cubic = TaylorPoly::from_cubic(raw.f0.unwrap_or(0.0), &g, &h, &t)?;
        for (a, c) in cubic.terms() {
            poly.add_term(a, c)?;
        }
    }
    Ok(poly)
}

pub fn read_poly(path: impl AsRef<std::path::Path>) -> Result<TaylorPoly> {
    parse_poly(&std::fs::read_to_string(path)?)
}

/// Serializes as a term list.
pub fn poly_to_json(poly: &TaylorPoly) -> String {
    let raw = PolyJson {
        n: poly.n,
        p: poly.p,
        terms: poly
            .terms()
            .map(|(a, c)| TermJson {
                alpha: a.to_vec(),
                coeff: c,
            })
            .collect(),
        f0: None,
        g: None,
        H: None,
        T: None,
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize, g: &[f64]) -> TaylorPoly {
        let h = DMatrix::zeros(n, n);
        TaylorPoly::from_cubic(0.0, g, &h, &SymTensor::zeros(3, n).unwrap()).unwrap()
    }

    #[test]
    fn homogenized_single_terms() {
        let mut q = TaylorPoly::new(1, 2).unwrap();
        q.add_term(&[2], 1.0).unwrap();
        let t = homogenize(&q);
        assert_eq!(t.get(&[1, 1]).unwrap(), 1.0);
        assert!((t.apply_full(&[1.0, 0.7]).unwrap() - 0.49).abs() < 1e-15);

        let mut c = TaylorPoly::new(1, 3).unwrap();
        c.add_term(&[1], 2.5).unwrap();
        let t = homogenize(&c);
        assert!((t.get(&[0, 0, 1]).unwrap() - 2.5 / 3.0).abs() < 1e-15);
        assert!((t.apply_full(&[1.0, 0.4]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_constructor_evaluates_taylor_sum() {
        let p = random_cubic(4, CubicScales::default(), 5).unwrap();
        let s = [0.3, -0.2, 0.5, 0.1];
        // rebuild the pieces from the polynomial's own derivatives at zero
        let z = [0.0; 4];
        let g = p.gradient(&z).unwrap();
        let h = p.hessian(&z).unwrap();
        let quad = 0.5 * (DVector::from_row_slice(&s).transpose() * &h * DVector::from_row_slice(&s))[(0, 0)];
        let lin: f64 = g.iter().zip(&s).map(|(a, b)| a * b).sum();
        let cubic = p.eval(&s).unwrap() - lin - quad;
        let scaled = [0.6, -0.4, 1.0, 0.2];
        let cubic2 = p.eval(&scaled).unwrap() - 2.0 * lin - 4.0 * quad;
        assert!((cubic2 - 8.0 * cubic).abs() < 1e-9 * cubic.abs().max(1.0));
    }

    #[test]
    fn linear_model_on_sphere() {
        let p = linear(3, &[1.0, 0.0, 0.0]);
        let r = solve_boundary(&p, 2.0, &TrConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.s[0] + 2.0).abs() < 1e-8 && r.s[1].abs() < 1e-8 && r.s[2].abs() < 1e-8);
        assert!((r.value + 2.0).abs() < 1e-8);
        assert!((r.lambda - 0.5).abs() < 1e-8);
        assert!(r.grad_lagrangian_norm <= 1e-10);
        let g = lagrangian_grad(&p, &[-2.0, 0.0, 0.0], 0.5).unwrap();
        assert!(pam::norm(&g) <= 1e-12);
        let flipped = lagrangian_grad(&p, &[-2.0, 0.0, 0.0], -0.5).unwrap();
        assert!((pam::norm(&flipped) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_model_matches_eigen_oracle() {
        let h = DMatrix::from_diagonal(&DVector::from_row_slice(&[-3.0, 1.0, 2.0]));
        let p = TaylorPoly::from_cubic(0.0, &[0.0; 3], &h, &SymTensor::zeros(3, 3).unwrap()).unwrap();
        let r = solve_boundary(&p, 1.0, &TrConfig { s0: Some(vec![0.5, 0.5, 0.5]), ..TrConfig::default() }).unwrap();
        assert!(r.converged);
        assert!((r.s[0].abs() - 1.0).abs() < 1e-6);
        assert!((r.value + 1.5).abs() < 1e-8);
        assert!((r.lambda - 3.0).abs() < 1e-6);
        let (min, pd) = check_second_order(&p, &[1.0, 0.0, 0.0], 3.0).unwrap();
        assert!((min - 4.0).abs() < 1e-12);
        assert!(pd);
    }

    #[test]
    fn second_order_trivial_cases() {
        let zero = TaylorPoly::new(3, 3).unwrap();
        let (min, pd) = check_second_order(&zero, &[2.0, 0.0, 0.0], 1.0).unwrap();
        assert!((min - 1.0).abs() < 1e-12 && pd);
        let one = TaylorPoly::new(1, 3).unwrap();
        assert_eq!(check_second_order(&one, &[1.0], -5.0).unwrap(), (f64::INFINITY, true));
        assert!(lagrangian_grad(&zero, &[0.1, 0.2, 0.3], 0.0).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        for s in [[1.0, 2.0, -0.5, 0.0], [-3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]] {
            let b = complement_basis(&s);
            let sv = DVector::from_row_slice(&s);
            assert!((b.transpose() * &sv).amax() < 1e-12);
            assert!((b.transpose() * &b - DMatrix::identity(3, 3)).amax() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_delta_is_rejected() {
        let p = linear(2, &[1.0, 1.0]);
        assert!(matches!(solve_boundary(&p, 0.0, &TrConfig::default()), Err(Error::Config(_))));
        assert!(matches!(solve_boundary(&p, -1.0, &TrConfig::default()), Err(Error::Config(_))));
    }

    #[test]
    fn json_round_trip_and_dense_blocks() {
        let p = random_cubic(3, CubicScales::default(), 9).unwrap();
        let back = parse_poly(&poly_to_json(&p)).unwrap();
        let s = [0.2, -0.7, 0.4];
        assert!((back.eval(&s).unwrap() - p.eval(&s).unwrap()).abs() < 1e-12);

        let text = r#"{"n": 2, "p": 3, "g": [1.0, -1.0], "H": [[2.0, 0.5], [0.5, 0.0]],
            "terms": [{"alpha": [3, 0], "coeff": 0.25}]}"#;
        let q = parse_poly(text).unwrap();
        let s = [0.5, 2.0];
        let want = 0.5 - 2.0 + 0.5 * (2.0 * 0.25 + 2.0 * 0.5 * 0.5 * 2.0) + 0.25 * 0.125;
        assert!((q.eval(&s).unwrap() - want).abs() < 1e-14);
        assert!(parse_poly(r#"{"n": 2, "p": 2, "g": [1.0, 0.0]}"#).is_err());
        assert!(parse_poly(r#"{"n": 2, "p": 3, "terms": [{"alpha": [2, 2], "coeff": 1.0}]}"#).is_err());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let p = random_cubic(4, CubicScales { a: 1.0, b: 1.0, c: 1.0 }, 2).unwrap();
        let s = [0.3, -0.1, 0.8, 0.2];
        let h = p.hessian(&s).unwrap();
        let step = 1e-6;
        for j in 0..4 {
            let mut up = s;
            let mut dn = s;
            up[j] += step;
            dn[j] -= step;
            let gu = p.gradient(&up).unwrap();
            let gd = p.gradient(&dn).unwrap();
            for i in 0..4 {
                let fd = (gu[i] - gd[i]) / (2.0 * step);
                assert!((fd - h[(i, j)]).abs() < 1e-6 * h[(i, j)].abs().max(1.0));
            }
        }
    }
}
