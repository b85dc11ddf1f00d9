//! Second-eigenvalue estimates and Expander Mixing Lemma audits.
//!
//! `λ(G) = max(|λ₂|, |λ_n|)` for a d-regular graph. Small graphs go through
//! a dense symmetric eigendecomposition; larger ones through Lanczos with
//! full reorthogonalization on the complement of the all-ones vector, which
//! resolves both ends of the spectrum at once.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::seed::{derived_rng, Rng};

pub const DENSE_LIMIT: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    Iterative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::Iterative => "iterative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub d: usize,
    pub lambda: f64,
    pub lambda2: f64,
    pub lambda_n: f64,
    pub epsilon_star: f64,
    pub method: Method,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("no convergence within {dimension} Krylov vectors (residual {residual:e})")]
    Budget { dimension: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    pub tol: f64,
    /// `None` picks dense up to [`DENSE_LIMIT`] vertices.
    pub method: Option<Method>,
    pub seed: u64,
    /// Cap on the Krylov basis size (the basis never exceeds n − 1).
    pub max_dimension: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, method: None, seed: 0, max_dimension: 2000 }
    }
}

/// Largest ε ∈ [0, 1] with `lambda ≤ d^(1−ε)`, or 0 if there is none.
pub fn epsilon_star(d: usize, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if d <= 1 {
        return if lambda <= d as f64 { 1.0 } else { 0.0 };
    }
    (1.0 - lambda.ln() / (d as f64).ln()).clamp(0.0, 1.0)
}

pub fn second_eigenvalue(g: &Graph, tol: f64) -> Result<SpectralReport, SpectralError> {
    second_eigenvalue_with(g, &SpectralConfig { tol, ..SpectralConfig::default() })
}

pub fn second_eigenvalue_with(g: &Graph, cfg: &SpectralConfig) -> Result<SpectralReport, SpectralError> {
    let d = g.regular_degree().ok_or(SpectralError::NotRegular)?;
    if !(cfg.tol > 0.0) {
        return Err(SpectralError::BadTolerance(cfg.tol));
    }
    let method = cfg.method.unwrap_or(if g.n() <= DENSE_LIMIT { Method::Dense } else { Method::Iterative });
    let (lambda2, lambda_n, residual) = if g.n() < 2 {
        (0.0, 0.0, 0.0)
    } else {
        match method {
            Method::Dense => dense_extremes(g),
            Method::Iterative => lanczos_extremes(g, d, cfg)?,
        }
    };
    let lambda = lambda2.abs().max(lambda_n.abs()).min(d as f64);
    Ok(SpectralReport { d, lambda, lambda2, lambda_n, epsilon_star: epsilon_star(d, lambda), method, residual })
}

fn multiply(g: &Graph, x: &[f64], y: &mut [f64]) {
    for (v, out) in y.iter_mut().enumerate() {
        *out = g.neighbors(v).iter().map(|&(w, _)| x[w]).sum();
    }
}

fn dense_extremes(g: &Graph) -> (f64, f64, f64) {
    let n = g.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let residual = |k: usize| {
        let v: DVector<f64> = eig.eigenvectors.column(k).into();
        (&a * &v - &v * eig.eigenvalues[k]).norm()
    };
    let (i2, i_n) = (order[1], order[n - 1]);
    (eig.eigenvalues[i2], eig.eigenvalues[i_n], residual(i2).max(residual(i_n)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        remove_mean(w);
        for q in basis {
            let c = dot(q, w);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// A random unit vector orthogonal to the ones vector and to `basis`.
fn fresh_direction(n: usize, basis: &[Vec<f64>], rng: &mut Rng) -> Option<Vec<f64>> {
    for _ in 0..3 {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut x, basis);
        let norm = dot(&x, &x).sqrt();
        if norm > 1e-8 {
            x.iter_mut().for_each(|v| *v /= norm);
            return Some(x);
        }
    }
    None
}

fn tridiagonal_extremes(alpha: &[f64], beta: &[f64]) -> (f64, f64, f64, f64) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (mut hi, mut lo) = (0, 0);
    for k in 0..m {
        if eig.eigenvalues[k] > eig.eigenvalues[hi] {
            hi = k;
        }
        if eig.eigenvalues[k] < eig.eigenvalues[lo] {
            lo = k;
        }
    }
    let last = beta[m - 1];
    let res = |k: usize| (last * eig.eigenvectors[(m - 1, k)]).abs();
    (eig.eigenvalues[hi], eig.eigenvalues[lo], res(hi), res(lo))
}

fn lanczos_extremes(g: &Graph, d: usize, cfg: &SpectralConfig) -> Result<(f64, f64, f64), SpectralError> {
    let n = g.n();
    let full = n - 1;
    let cap = full.min(cfg.max_dimension.max(1));
    let mut rng = derived_rng(cfg.seed, "lanczos", 0);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut q = fresh_direction(n, &basis, &mut rng).expect("n ≥ 2 leaves room beside the ones vector");
    let mut w = vec![0.0; n];
    let mut next_check = 8;
    let mut last = (d as f64, -(d as f64), f64::INFINITY);
    loop {
        multiply(g, &q, &mut w);
        let a = dot(&q, &w);
        basis.push(std::mem::take(&mut q));
        orthogonalize(&mut w, &basis);
        alpha.push(a);
        let b = dot(&w, &w).sqrt();
        let dim = basis.len();
        let exhausted = dim == full;
        // a tiny b means the Krylov space is invariant; continue with a new direction
        let restart = b < 1e-10 && !exhausted;
        beta.push(if exhausted || restart { 0.0 } else { b });

        if dim >= next_check || exhausted || dim == cap || restart {
            let (hi, lo, rhi, rlo) = tridiagonal_extremes(&alpha, &beta);
            last = (hi, lo, rhi.max(rlo));
            if last.2 <= cfg.tol && !restart || exhausted {
                return Ok(last);
            }
            next_check = dim + (dim / 8).max(8);
        }
        if dim == cap {
            return Err(SpectralError::Budget { dimension: dim, residual: last.2 });
        }
        q = if restart {
            match fresh_direction(n, &basis, &mut rng) {
                Some(v) => v,
                None => return Ok(last),
            }
        } else {
            w.iter().map(|x| x / b).collect()
        };
    }
}

/// Number of ordered pairs `(x, y) ∈ S × T` with `xy ∈ E`.
pub fn ordered_edge_count(g: &Graph, s: &[Vertex], t: &[Vertex]) -> usize {
    let mut in_t = vec![false; g.n()];
    t.iter().for_each(|&y| in_t[y] = true);
    s.iter().map(|&x| g.neighbors(x).iter().filter(|&&(y, _)| in_t[y]).count()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingViolation {
    pub s: Vec<Vertex>,
    pub t: Vec<Vertex>,
    pub e_st: usize,
    pub expected: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingAudit {
    pub exhaustive: bool,
    /// Number of sets S examined; every T is covered for each S.
    pub sets_checked: usize,
    pub violation: Option<MixingViolation>,
}

impl MixingAudit {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

pub const EXHAUSTIVE_AUDIT_LIMIT: usize = 16;

/// Checks `|e(S,T) − d|S||T|/n| ≤ λ·√(|S||T|)`. For each S examined, all T
/// are covered at once: for fixed |T| = k the extreme values of e(S,T) are
/// the sums of the k largest and k smallest counts `|N(y) ∩ S|`. Every S is
/// examined when n ≤ 16, otherwise `trials` random ones.
pub fn mixing_audit(g: &Graph, lambda: f64, trials: usize, seed: u64) -> MixingAudit {
    let n = g.n();
    let d = g.max_degree() as f64;
    let mut checked = 0;
    let mut check = |s: &[Vertex]| -> Option<MixingViolation> {
        checked += 1;
        let mut weight = vec![0usize; n];
        for &x in s {
            g.neighbors(x).iter().for_each(|&(y, _)| weight[y] += 1);
        }
        let mut order: Vec<Vertex> = (0..n).collect();
        order.sort_by(|&a, &b| weight[b].cmp(&weight[a]).then(a.cmp(&b)));
        let (mut top, mut bottom) = (0usize, 0usize);
        for k in 1..=n {
            top += weight[order[k - 1]];
            bottom += weight[order[n - k]];
            let expected = d * s.len() as f64 * k as f64 / n as f64;
            let bound = lambda * ((s.len() * k) as f64).sqrt();
            let slack = 1e-9 * (1.0 + expected);
            let (e_st, t) = if top as f64 - expected > bound + slack {
                (top, order[..k].to_vec())
            } else if expected - bottom as f64 > bound + slack {
                (bottom, order[n - k..].to_vec())
            } else {
                continue;
            };
            let mut t = t;
            t.sort_unstable();
            return Some(MixingViolation { s: s.to_vec(), t, e_st, expected, bound });
        }
        None
    };

    if n <= EXHAUSTIVE_AUDIT_LIMIT {
        for mask in 1u32..(1u32 << n) {
            let s: Vec<Vertex> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if let Some(v) = check(&s) {
                return MixingAudit { exhaustive: true, sets_checked: checked, violation: Some(v) };
            }
        }
        return MixingAudit { exhaustive: true, sets_checked: checked, violation: None };
    }
    let mut rng = derived_rng(seed, "mixing", 0);
    let mut all: Vec<Vertex> = (0..n).collect();
    for _ in 0..trials {
        let size = rng.gen_range(1..=n);
        all.shuffle(&mut rng);
        let mut s = all[..size].to_vec();
        s.sort_unstable();
        if let Some(v) = check(&s) {
            return MixingAudit { exhaustive: false, sets_checked: checked, violation: Some(v) };
        }
    }
    MixingAudit { exhaustive: false, sets_checked: checked, violation: None }
}
