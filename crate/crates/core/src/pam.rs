//! Proximal alternating minimization over products of spheres.
//!
//! For an order-`d` form `A` the solver minimizes the multilinear objective
//!
//! ```text
//! h(t_1, ..., t_d) = <A, t_1 o ... o t_d> - alpha E(t_1, ..., t_d)
//! ```
//!
//! where `E` is the multilinear form of `||x||^d`, the mean over all perfect
//! matchings of the blocks of the paired inner products. For odd `d` the
//! blocks are completed with `e_0`, so `E(x, ..., x) = ||x||^(d-1) x_0`.
//!
//! one block at a time, each block restricted to its own sphere. Every block
//! subproblem carries a proximal term `gamma_j / 2 ||t_j - t_j^(k)||^2` and has
//! a two-candidate closed form. After each sweep the homogeneous value `h(b, ..., b)`
//! is evaluated at every block and the smallest one is kept as the current
//! best point `v`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{matchings, MultilinearForm};

const DEGENERATE_TOL: f64 = 1e-14;
const TIE_TOL: f64 = 1e-14;

/// How the initial blocks are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Entries drawn uniformly from `[lo, hi)`, then scaled to the block radius.
    Uniform { lo: f64, hi: f64 },
    /// Explicit blocks, scaled to their radii.
    Given(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PamConfig {
    /// Concavification weight. `None` uses the Frobenius norm of the operator.
    pub alpha: Option<f64>,
    /// Proximal weights, one per block or a single value for all blocks.
    pub gammas: Vec<f64>,
    /// Sphere radii, one per block or a single value for all blocks.
    pub radii: Vec<f64>,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub init: Init,
}

impl Default for PamConfig {
    fn default() -> Self {
        PamConfig {
            alpha: None,
            gammas: vec![1.0],
            radii: vec![1.0],
            eps: 1e-6,
            max_iter: 10_000,
            seed: 0,
            init: Init::Uniform { lo: -1.0, hi: 1.0 },
        }
    }
}

/// One row per sweep. `step_norm` is `||t^(k) - t^(k-1)||` (zero on the initial row).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryRow {
    pub iter: usize,
    pub h_t: f64,
    pub h_v: f64,
    pub step_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PamResult {
    pub v: Vec<f64>,
    /// Homogeneous value at `v`.
    pub value: f64,
    pub blocks: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
    pub alpha: f64,
    pub degenerate_updates: usize,
    pub history: Vec<HistoryRow>,
}

/// Writes `iter,h_t,h_v,step_norm` rows.
pub fn write_history(history: &[HistoryRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "iter,h_t,h_v,step_norm")?;
    for r in history {
        writeln!(out, "{},{:e},{:e},{:e}", r.iter, r.h_t, r.h_v, r.step_norm)?;
    }
    Ok(())
}

/// Feasible set of a single block.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Geometry {
    /// Block `j` lies on the sphere of radius `radii[j]`.
    Sphere(Vec<f64>),
    /// Every block is `(1, w)` with `||w|| = delta`.
    Pinned(f64),
}

impl Geometry {
    fn radius(&self, j: usize) -> f64 {
        match self {
            Geometry::Sphere(r) => r[j],
            Geometry::Pinned(delta) => *delta,
        }
    }

    /// Orthogonal projection onto the free coordinates.
    fn project(&self, v: &mut [f64]) {
        if let Geometry::Pinned(_) = self {
            v[0] = 0.0;
        }
    }

    /// Puts `w` (already on the free coordinates) into the feasible set of block `j`.
    fn place(&self, mut w: Vec<f64>, j: usize) -> Vec<f64> {
        self.project(&mut w);
        let n = norm(&w);
        let r = self.radius(j);
        for x in w.iter_mut() {
            *x *= r / n;
        }
        if let Geometry::Pinned(_) = self {
            w[0] = 1.0;
        }
        w
    }

    fn is_feasible(&self, x: &[f64], j: usize) -> bool {
        let mut w = x.to_vec();
        self.project(&mut w);
        let pin_ok = match self {
            Geometry::Pinned(_) => x[0] == 1.0,
            Geometry::Sphere(_) => true,
        };
        pin_ok && (norm(&w) - self.radius(j)).abs() <= 1e-10 * self.radius(j).max(1.0)
    }

    fn random_block(&self, rng: &mut ChaCha8Rng, dim: usize, j: usize, lo: f64, hi: f64) -> Vec<f64> {
        loop {
            let w: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..hi)).collect();
            let mut p = w.clone();
            self.project(&mut p);
            if norm(&p) > 1e-8 {
                return self.place(w, j);
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Blocks completed to an even count: a lone trailing slot is paired with `e_0`.
fn with_anchor<'a>(blocks: &[&'a [f64]], e0: &'a [f64]) -> Vec<&'a [f64]> {
    let mut all = blocks.to_vec();
    if all.len() % 2 == 1 {
        all.push(e0);
    }
    all
}

fn unit_e0(dim: usize) -> Vec<f64> {
    let mut e0 = vec![0.0; dim];
    e0[0] = 1.0;
    e0
}

/// Polarized `||x||^d`: the mean over perfect matchings of the blocks of the
/// product of paired inner products.
fn alpha_product(blocks: &[&[f64]]) -> f64 {
    let e0 = unit_e0(blocks[0].len());
    let all = with_anchor(blocks, &e0);
    let ms = matchings(all.len());
    let total: f64 = ms
        .iter()
        .map(|mm| mm.iter().map(|&(a, b)| dot(all[a], all[b])).product::<f64>())
        .sum();
    total / ms.len() as f64
}

/// Gradient of `alpha_product` in slot `j`.
fn alpha_partial(blocks: &[Vec<f64>], j: usize) -> Vec<f64> {
    let dim = blocks[j].len();
    let e0 = unit_e0(dim);
    let refs: Vec<&[f64]> = blocks.iter().map(|b| b.as_slice()).collect();
    let all = with_anchor(&refs, &e0);
    let ms = matchings(all.len());
    let mut g = vec![0.0; dim];
    for mm in &ms {
        let mut partner = j;
        let mut rest = 1.0;
        for &(a, b) in mm {
            if a == j {
                partner = b;
            } else if b == j {
                partner = a;
            } else {
                rest *= dot(all[a], all[b]);
            }
        }
        for (gi, v) in g.iter_mut().zip(all[partner]) {
            *gi += rest * v;
        }
    }
    let k = ms.len() as f64;
    g.into_iter().map(|v| v / k).collect()
}

fn h_value<F: MultilinearForm + ?Sized>(op: &F, alpha: f64, blocks: &[&[f64]]) -> Result<f64> {
    let a = op.multilinear_apply(blocks)?;
    if alpha == 0.0 {
        return Ok(a);
    }
    Ok(a - alpha * alpha_product(blocks))
}

/// The multilinear objective for an even number of blocks.
pub fn h_alpha_multilinear<F: MultilinearForm + ?Sized>(
    op: &F,
    alpha: f64,
    blocks: &[&[f64]],
) -> Result<f64> {
    if blocks.len() % 2 == 1 {
        return Err(Error::Arity {
            expected: blocks.len() + 1,
            got: blocks.len(),
        });
    }
    h_value(op, alpha, blocks)
}

/// `h(x, ..., x)`.
pub(crate) fn h_homogeneous<F: MultilinearForm + ?Sized>(op: &F, alpha: f64, x: &[f64]) -> Result<f64> {
    let blocks = vec![x; op.order()];
    h_value(op, alpha, &blocks)
}

/// Linear coefficient of block `j`: `h = <c, t_j>` with the other blocks fixed.
fn block_coefficient<F: MultilinearForm + ?Sized>(
    op: &F,
    alpha: f64,
    blocks: &[Vec<f64>],
    j: usize,
) -> Result<Vec<f64>> {
    let others: Vec<&[f64]> = blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, b)| b.as_slice())
        .collect();
    let mut c = op.multilinear_partial(&others, j)?;
    if alpha != 0.0 {
        for (ci, gi) in c.iter_mut().zip(alpha_partial(blocks, j)) {
            *ci -= alpha * gi;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockUpdate {
    pub x: Vec<f64>,
    pub degenerate: bool,
}

fn update_block<F: MultilinearForm + ?Sized>(
    op: &F,
    alpha: f64,
    geometry: &Geometry,
    blocks: &[Vec<f64>],
    j: usize,
    gamma: f64,
) -> Result<BlockUpdate> {
    let c = block_coefficient(op, alpha, blocks, j)?;
    Ok(closed_form(&c, &blocks[j], gamma, geometry, j))
}

fn closed_form(c: &[f64], xk: &[f64], gamma: f64, geometry: &Geometry, j: usize) -> BlockUpdate {
    let mut dir: Vec<f64> = c.iter().zip(xk).map(|(ci, xi)| ci - gamma * xi).collect();
    geometry.project(&mut dir);
    if norm(&dir) < DEGENERATE_TOL {
        return BlockUpdate {
            x: xk.to_vec(),
            degenerate: true,
        };
    }
    let minus = geometry.place(dir.iter().map(|v| -v).collect(), j);
    let plus = geometry.place(dir, j);
    let objective = |x: &[f64]| {
        let prox: f64 = x.iter().zip(xk).map(|(a, b)| (a - b) * (a - b)).sum();
        dot(c, x) + 0.5 * gamma * prox
    };
    let (om, op) = (objective(&minus), objective(&plus));
    let x = if (om - op).abs() < TIE_TOL {
        if dot(&plus, xk) > dot(&minus, xk) {
            plus
        } else {
            minus
        }
    } else if om <= op {
        minus
    } else {
        plus
    };
    BlockUpdate { x, degenerate: false }
}

/// Closed-form minimizer of block `j` on the sphere of radius `radius`,
/// `blocks[j]` being the previous iterate.
pub fn block_update<F: MultilinearForm + ?Sized>(
    op: &F,
    alpha: f64,
    blocks: &[Vec<f64>],
    j: usize,
    gamma: f64,
    radius: f64,
) -> Result<BlockUpdate> {
    if j >= blocks.len() {
        return Err(Error::Index {
            index: vec![j + 1],
            dim: blocks.len(),
        });
    }
    let geometry = Geometry::Sphere(vec![radius; blocks.len()]);
    update_block(op, alpha, &geometry, blocks, j, gamma)
}

/// Closed-form minimizer of `<c, x> + gamma/2 ||x - xk||^2` over `||x|| = radius`.
pub fn prox_sphere_step(c: &[f64], xk: &[f64], gamma: f64, radius: f64) -> BlockUpdate {
    closed_form(c, xk, gamma, &Geometry::Sphere(vec![radius]), 0)
}

/// Stacked stationarity residual over blocks: the part of each block
/// gradient not explained by the sphere normal.
pub(crate) fn kkt_residual<F: MultilinearForm + ?Sized>(
    op: &F,
    alpha: f64,
    geometry: &Geometry,
    blocks: &[Vec<f64>],
) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..blocks.len() {
        let mut c = block_coefficient(op, alpha, blocks, j)?;
        let mut t = blocks[j].clone();
        geometry.project(&mut c);
        geometry.project(&mut t);
        let tt = dot(&t, &t);
        let mu = if tt > 0.0 { dot(&c, &t) / tt } else { 0.0 };
        total += c
            .iter()
            .zip(&t)
            .map(|(ci, ti)| (ci - mu * ti).powi(2))
            .sum::<f64>();
    }
    Ok(total.sqrt())
}

fn broadcast(values: &[f64], d: usize, what: &str) -> Result<Vec<f64>> {
    match values.len() {
        1 => Ok(vec![values[0]; d]),
        len if len == d => Ok(values.to_vec()),
        len => Err(Error::Config(format!(
            "{what}: expected 1 or {d} values, got {len}"
        ))),
    }
}

pub(crate) struct Problem<'a, F: ?Sized> {
    pub op: &'a F,
    pub alpha: f64,
    pub gammas: Vec<f64>,
    pub geometry: Geometry,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

pub(crate) fn initial_blocks(
    geometry: &Geometry,
    d: usize,
    dim: usize,
    init: &Init,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    match init {
        Init::Uniform { lo, hi } => {
            if !(lo < hi) {
                return Err(Error::Config(format!("empty init range [{lo}, {hi})")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..d)
                .map(|j| geometry.random_block(&mut rng, dim, j, *lo, *hi))
                .collect())
        }
        Init::Given(blocks) => {
            if blocks.len() != d {
                return Err(Error::Arity {
                    expected: d,
                    got: blocks.len(),
                });
            }
            blocks
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    if b.len() != dim {
                        return Err(Error::Dim {
                            expected: dim,
                            got: b.len(),
                        });
                    }
                    let mut p = b.clone();
                    geometry.project(&mut p);
                    if norm(&p) == 0.0 {
                        return Err(Error::Domain("initial block is zero".into()));
                    }
                    Ok(geometry.place(b.clone(), j))
                })
                .collect()
        }
    }
}

fn best_block<F: MultilinearForm + ?Sized>(op: &F, alpha: f64, blocks: &[Vec<f64>]) -> Result<(usize, f64)> {
    let mut best = (0, f64::INFINITY);
    for (j, b) in blocks.iter().enumerate() {
        let h = h_homogeneous(op, alpha, b)?;
        if h < best.1 || best.1.is_nan() {
            best = (j, h);
        }
    }
    Ok(best)
}

fn refs(b: &[Vec<f64>]) -> Vec<&[f64]> {
    b.iter().map(|x| x.as_slice()).collect()
}

/// Runs the sweeps from `blocks`, which may start outside the feasible set.
pub(crate) fn run<F: MultilinearForm + ?Sized>(
    problem: &Problem<'_, F>,
    mut blocks: Vec<Vec<f64>>,
) -> Result<PamResult> {
    let op = problem.op;
    let alpha = problem.alpha;
    let d = blocks.len();
    let dim = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed ^ 0x9E37_79B9_7F4A_7C15);

    let mut h_t = h_value(op, alpha, &refs(&blocks))?;
    let (v_idx, mut h_v) = best_block(op, alpha, &blocks)?;
    let mut v = blocks[v_idx].clone();
    let mut history = vec![HistoryRow {
        iter: 0,
        h_t,
        h_v,
        step_norm: 0.0,
    }];
    let mut converged = false;
    let mut degenerate_updates = 0;
    let mut iterations = 0;
    let mut warned = false;

    for k in 1..=problem.max_iter {
        iterations = k;
        let prev = blocks.clone();
        for j in 0..d {
            let upd = update_block(op, alpha, &problem.geometry, &blocks, j, problem.gammas[j])?;
            if upd.degenerate {
                degenerate_updates += 1;
                if !problem.geometry.is_feasible(&blocks[j], j) {
                    blocks[j] = problem.geometry.random_block(&mut rng, dim, j, -1.0, 1.0);
                    continue;
                }
            }
            blocks[j] = upd.x;
        }
        let step = prev
            .iter()
            .zip(&blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        h_t = h_value(op, alpha, &refs(&blocks))?;
        let (j_best, h_best) = best_block(op, alpha, &blocks)?;
        if !h_t.is_finite() || !h_best.is_finite() || !step.is_finite() {
            return Err(Error::Numerical { iteration: k });
        }
        if !warned && h_best > h_t + 1e-9 && matches!(problem.geometry, Geometry::Sphere(_)) {
            log::debug!(
                "iteration {k}: best homogeneous block value {h_best:.6e} exceeds the multilinear value {h_t:.6e}"
            );
            warned = true;
        }
        let previous_v = h_v;
        h_v = h_best;
        v = blocks[j_best].clone();
        history.push(HistoryRow {
            iter: k,
            h_t,
            h_v,
            step_norm: step,
        });
        if (h_v - previous_v).abs() < problem.eps {
            converged = true;
            break;
        }
    }

    let kkt = kkt_residual(op, alpha, &problem.geometry, &blocks)?;
    Ok(PamResult {
        v,
        value: h_v,
        blocks,
        iterations,
        converged,
        kkt_residual: kkt,
        alpha,
        degenerate_updates,
        history,
    })
}

/// Minimizes the multilinear objective of `op` over `d = op.order()` spheres.
pub fn pam_solve<F: MultilinearForm + ?Sized>(op: &F, config: &PamConfig) -> Result<PamResult> {
    let d = op.order();
    if d % 2 == 1 {
        return Err(Error::Arity {
            expected: d + 1,
            got: d,
        });
    }
    if !(config.eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {}", config.eps)));
    }
    let gammas = broadcast(&config.gammas, d, "gammas")?;
    let radii = broadcast(&config.radii, d, "radii")?;
    if gammas.iter().any(|g| !(*g >= 0.0)) {
        return Err(Error::Config("gammas must be nonnegative".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Config("radii must be positive".into()));
    }
    let frobenius = op.frobenius_norm();
    let alpha = config.alpha.unwrap_or(frobenius);
    if !(alpha >= 0.0) {
        return Err(Error::Config(format!("alpha must be nonnegative, got {alpha}")));
    }
    if alpha < frobenius && radii.iter().all(|&r| r == 1.0) {
        log::debug!("alpha = {alpha:.4e} is below the Frobenius norm {frobenius:.4e}; the objective may not be concave");
    }
    let geometry = Geometry::Sphere(radii);
    let blocks = initial_blocks(&geometry, d, op.dim(), &config.init, config.seed)?;
    let problem = Problem {
        op,
        alpha,
        gammas,
        geometry,
        eps: config.eps,
        max_iter: config.max_iter,
        seed: config.seed,
    };
    run(&problem, blocks)
}

/// `tau = d^-1 (3d - 3)^(1 - dn)` and the sequence rate exponent `tau / (1 - 2 tau)`.
pub fn kl_exponent(d: usize, n: usize) -> Result<(f64, f64)> {
    if d < 2 || n < 2 {
        return Err(Error::Domain(format!(
            "exponent defined for d >= 2 and n >= 2, got d = {d}, n = {n}"
        )));
    }
    let base = (3 * d - 3) as f64;
    let tau = 1.0 / (d as f64 * base.powi((d * n - 1) as i32));
    assert!(tau < 0.5);
    Ok((tau, tau / (1.0 - 2.0 * tau)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SymTensor;

    fn a1() -> SymTensor {
        SymTensor::from_entries(2, 2, vec![(vec![1, 1], 1.0), (vec![2, 2], -2.0)]).unwrap()
    }

    #[test]
    fn multilinear_objective_on_a1() {
        let a = a1();
        let x = [0.0, 1.0];
        let h = h_alpha_multilinear(&a, 5f64.sqrt(), &[&x, &x]).unwrap();
        assert!((h - (-2.0 - 5f64.sqrt())).abs() < 1e-14);
        let y = [0.6, 0.8];
        assert_eq!(
            h_alpha_multilinear(&a, 0.0, &[&x, &y]).unwrap(),
            a.multilinear_apply(&[&x, &y]).unwrap()
        );
    }

    #[test]
    fn odd_block_count_is_rejected() {
        let t = SymTensor::zeros(3, 2).unwrap();
        let x = [1.0, 0.0];
        assert!(matches!(
            h_alpha_multilinear(&t, 1.0, &[&x, &x, &x]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(pam_solve(&t, &PamConfig::default()), Err(Error::Arity { .. })));
    }

    #[test]
    fn linear_step_picks_negative_direction() {
        let u = prox_sphere_step(&[1.0, 0.0], &[0.0, 1.0], 0.0, 1.0);
        assert!(!u.degenerate);
        assert!((u.x[0] + 1.0).abs() < 1e-15 && u.x[1].abs() < 1e-15);
    }

    #[test]
    fn degenerate_step_keeps_previous_block() {
        let xk = [0.6, 0.8];
        let u = prox_sphere_step(&[1.2, 1.6], &xk, 2.0, 1.0);
        assert!(u.degenerate);
        assert_eq!(u.x, xk.to_vec());
    }

    #[test]
    fn block_update_matches_circle_sampling() {
        let a = a1();
        let alpha = 5f64.sqrt();
        let blocks = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let upd = block_update(&a, alpha, &blocks, 0, 1.0, 1.0).unwrap();

        // c = A y - alpha y
        let c = [0.0, -2.0 - alpha];
        let objective = |x: [f64; 2]| {
            c[0] * x[0] + c[1] * x[1] + 0.5 * ((x[0] - 1.0).powi(2) + x[1].powi(2))
        };
        let samples = 1_000_000;
        let best = (0..samples)
            .map(|i| {
                let t = i as f64 / samples as f64 * std::f64::consts::TAU;
                objective([t.cos(), t.sin()])
            })
            .fold(f64::INFINITY, f64::min);
        let got = objective([upd.x[0], upd.x[1]]);
        assert!(got <= best + 1e-12);
        assert!((got - best).abs() <= 1e-4);
    }

    #[test]
    fn a1_reaches_shifted_minimum() {
        let a = a1();
        for seed in 0..5 {
            let cfg = PamConfig {
                alpha: Some(5f64.sqrt()),
                seed,
                ..PamConfig::default()
            };
            let r = pam_solve(&a, &cfg).unwrap();
            assert!(r.converged);
            assert!((r.value - (-2.0 - 5f64.sqrt())).abs() < 1e-6);
            assert!(r.v[0].abs() < 1e-3 && (r.v[1].abs() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_tensor_stops_immediately() {
        let t = SymTensor::zeros(4, 3).unwrap();
        let cfg = PamConfig {
            alpha: Some(0.0),
            ..PamConfig::default()
        };
        let r = pam_solve(&t, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 2);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn blocks_stay_on_their_spheres() {
        let t = SymTensor::from_class_fn(4, 3, |c| ((c[0] + 2 * c[3]) as f64).cos()).unwrap();
        let cfg = PamConfig {
            radii: vec![1.0, 2.0, 0.5, 3.0],
            gammas: vec![0.5, 1.0, 2.0, 1.5],
            max_iter: 200,
            ..PamConfig::default()
        };
        let r = pam_solve(&t, &cfg).unwrap();
        for (b, rad) in r.blocks.iter().zip(&cfg.radii) {
            assert!((norm(b) - rad).abs() < 1e-12);
        }
    }

    #[test]
    fn config_lengths_are_checked() {
        let cfg = PamConfig {
            gammas: vec![1.0, 1.0, 1.0],
            ..PamConfig::default()
        };
        assert!(matches!(pam_solve(&a1(), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn kl_exponent_values() {
        let (tau, rate) = kl_exponent(2, 2).unwrap();
        assert_eq!(tau, 1.0 / 54.0);
        assert!((rate - tau / (1.0 - 2.0 * tau)).abs() < 1e-18);
        let (tau, _) = kl_exponent(4, 3).unwrap();
        assert!((tau - 0.25 * 9f64.powi(-11)).abs() <= 1e-16 * tau);
        assert!(matches!(kl_exponent(1, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn history_csv_has_header_and_rows() {
        let r = pam_solve(&a1(), &PamConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_history(&r.history, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iter,h_t,h_v,step_norm\n"));
        assert_eq!(text.lines().count(), r.history.len() + 1);
    }
}
