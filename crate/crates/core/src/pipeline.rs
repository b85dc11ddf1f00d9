//! End-to-end 1-factorization driver, the independent verifier, the
//! factorization file format and the counting bounds.
//!
//! One attempt of [`factorize`]:
//! 1. partition `E(G)` into `t` balanced bipartite pieces `H_i`;
//! 2. take an `r`-factor `W_i ⊆ H_i` with `r` as large as every piece allows,
//!    lowered by one if `r' = d − r·t` would be odd;
//! 3. 2-factorize `G' = G − ∪W_i` and deal the 2-factors round-robin into
//!    `t` groups `G'_i`;
//! 4. complete each `R_i = W_i ∪ G'_i` across `(A_i, B_i)`.
//!
//! Edges crossing none of the bipartitions lie in no `H_i` and so end up in
//! `G'`. A run is a success only once [`verify_factorization`] accepts.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::coloring::{bipartite_one_factorization, two_factorization};
use crate::completion::{absorb_internal_edges, CompletionConfig};
use crate::graph::{parse_fields, EdgeId, FormatError, Graph, Matching, OneFactorization, Vertex};
use crate::matching::{max_feasible_factor, r_factor, BipartiteView};
use crate::partition::{partition, PartitionConfig};
use crate::seed::derive;
use crate::spectral::{second_eigenvalue, SpectralReport, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PipelineConfig {
    /// Number of pieces; must be odd.
    pub t: usize,
    /// Continue with `t − 2` (down to 1) after a degenerate factor, or after
    /// two completion failures in a row at the same `t`.
    pub adaptive_t: bool,
    pub epsilon: f64,
    pub alpha: f64,
    pub seed: u64,
    /// Full pipeline attempts, each with its own derived seed.
    pub max_retries: usize,
    pub partition: PartitionConfig,
    pub completion: CompletionConfig,
    pub spectral_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            t: 3,
            adaptive_t: true,
            epsilon: 0.1,
            alpha: 0.1,
            seed: 0,
            max_retries: 8,
            partition: PartitionConfig::default(),
            completion: CompletionConfig::default(),
            spectral_tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("a 1-factorization needs an even number of vertices, got {0}")]
    OddOrder(usize),
    #[error("t must be odd and positive, got {0}")]
    BadT(usize),
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("alpha must lie in (0, 1/10], got {0}")]
    BadAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Partition,
    Factor,
    Remainder,
    Completion,
    Verification,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Partition => "partition",
            Stage::Factor => "factor",
            Stage::Remainder => "remainder",
            Stage::Completion => "completion",
            Stage::Verification => "verification",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage: {}", self.stage, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub attempts: usize,
    /// `t` used by the final attempt.
    pub t: usize,
    /// Common factor degree of the final attempt.
    pub r: usize,
    pub r_prime: usize,
    pub r_primes: Vec<usize>,
    /// `(d/t)(1 − 16/t^{1/3})`, the asymptotic factor degree.
    pub r_bar: f64,
    pub partition_samples: usize,
    pub completion_rounds: usize,
    pub recolorings: usize,
    /// Attempt failures in order, as `stage: message`.
    pub failures: Vec<String>,
    pub shortcut: Option<&'static str>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizeOutcome {
    pub result: Result<OneFactorization, Failure>,
    pub spectral: Option<SpectralReport>,
    pub stats: Stats,
}

impl FactorizeOutcome {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }
}

fn check_config(cfg: &PipelineConfig) -> Result<(), InputError> {
    if cfg.t == 0 || cfg.t % 2 == 0 {
        return Err(InputError::BadT(cfg.t));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(InputError::BadEpsilon(cfg.epsilon));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha <= 0.1) {
        return Err(InputError::BadAlpha(cfg.alpha));
    }
    Ok(())
}

pub fn factorize(g: &Graph, cfg: &PipelineConfig) -> Result<FactorizeOutcome, InputError> {
    let start = Instant::now();
    check_config(cfg)?;
    let d = g.regular_degree().ok_or(InputError::NotRegular)?;
    if g.n() % 2 == 1 {
        return Err(InputError::OddOrder(g.n()));
    }
    let spectral = second_eigenvalue(g, cfg.spectral_tol).ok();
    let mut stats = Stats { t: cfg.t, ..Stats::default() };

    let result = if d == 0 {
        stats.shortcut = Some("empty");
        Ok(OneFactorization::new(Vec::new()))
    } else if let Some(side) = g.bipartition() {
        stats.shortcut = Some("bipartite");
        let f = bipartite_one_factorization(&BipartiteView::crossing(g, &side))
            .expect("regular bipartite graphs have balanced sides");
        Ok(f)
    } else {
        run_attempts(g, d, cfg, &mut stats)
    };
    let result = result.and_then(|f| match verify_factorization(g, &f) {
        Verdict::Accept => Ok(f),
        Verdict::Reject(v) => Err(Failure { stage: Stage::Verification, message: v.to_string() }),
    });
    stats.wall_time = start.elapsed();
    Ok(FactorizeOutcome { result, spectral, stats })
}

fn run_attempts(g: &Graph, d: usize, cfg: &PipelineConfig, stats: &mut Stats) -> Result<OneFactorization, Failure> {
    let mut t = cfg.t;
    let mut last = Failure { stage: Stage::Partition, message: "no attempts allowed".into() };
    let mut completion_misses = 0;
    for attempt in 0..cfg.max_retries.max(1) {
        stats.attempts = attempt + 1;
        stats.t = t;
        let seed = derive(cfg.seed, "attempt", attempt as u64);
        match attempt_once(g, d, t, cfg, seed, stats) {
            Ok(f) => match verify_factorization(g, &f) {
                Verdict::Accept => return Ok(f),
                Verdict::Reject(v) => last = Failure { stage: Stage::Verification, message: v.to_string() },
            },
            Err(f) => last = f,
        }
        stats.failures.push(last.to_string());
        completion_misses = if last.stage == Stage::Completion { completion_misses + 1 } else { 0 };
        if cfg.adaptive_t && t > 1 && (last.stage == Stage::Factor || completion_misses == 2) {
            t -= 2;
            completion_misses = 0;
        }
    }
    Err(last)
}

fn attempt_once(
    g: &Graph,
    d: usize,
    t: usize,
    cfg: &PipelineConfig,
    seed: u64,
    stats: &mut Stats,
) -> Result<OneFactorization, Failure> {
    let fail = |stage, message: String| Failure { stage, message };
    stats.r = 0;
    stats.r_prime = 0;
    stats.r_primes.clear();
    stats.completion_rounds = 0;
    stats.r_bar = (d as f64 / t as f64) * (1.0 - 16.0 / (t as f64).cbrt());

    let pcfg = PartitionConfig { t, ..cfg.partition };
    let plan = partition(g, &pcfg, seed).map_err(|e| fail(Stage::Partition, e.to_string()))?;
    stats.partition_samples += plan.attempts;

    let views: Vec<BipartiteView> = (0..t).map(|i| plan.view(g, i)).collect();
    let mut r = views.iter().map(|v| max_feasible_factor(v).0).min().unwrap_or(0);
    if (d - r * t) % 2 == 1 {
        r = r.saturating_sub(1);
    }
    if r == 0 || (d - r * t) % 2 == 1 {
        return Err(fail(Stage::Factor, format!("degenerate factor: largest common degree is {r} with t = {t}")));
    }
    let r_prime = d - r * t;
    stats.r = r;
    stats.r_prime = r_prime;

    let mut factors = Vec::with_capacity(t);
    for view in &views {
        let w = r_factor(view, r).map_err(|e| fail(Stage::Factor, e.to_string()))?;
        factors.push(w.edges);
    }

    let used: Vec<EdgeId> = factors.iter().flatten().copied().collect();
    let (rest, remap) = g.subtract_edges(&used).map_err(|e| fail(Stage::Remainder, e.to_string()))?;
    let mut groups = vec![Vec::new(); t];
    if r_prime > 0 {
        let tf = two_factorization(&rest).map_err(|e| fail(Stage::Remainder, e.to_string()))?;
        for (j, factor) in tf.factors.into_iter().enumerate() {
            groups[j % t].extend(factor.into_iter().map(|e| remap.to_old[e]));
        }
    }
    stats.r_primes = groups.iter().map(|grp| 2 * grp.len() / g.n()).collect();

    let mut classes = Vec::with_capacity(d);
    for i in 0..t {
        let mut keep = factors[i].clone();
        let w_len = keep.len();
        keep.extend_from_slice(&groups[i]);
        let (ri, map) = g.edge_subgraph(&keep).map_err(|e| fail(Stage::Completion, e.to_string()))?;
        let h = BipartiteView::with_edges(&ri, &plan.sides[i], (0..w_len).collect())
            .map_err(|e| fail(Stage::Completion, e.to_string()))?;
        let done = absorb_internal_edges(&h, &cfg.completion, derive(seed, "piece", i as u64))
            .map_err(|e| fail(Stage::Completion, format!("piece {i}: {e}")))?;
        stats.completion_rounds += done.rounds;
        stats.recolorings += done.recolorings;
        for class in done.factorization.classes {
            let edges = class.edges().iter().map(|&e| map.to_old[e]).collect();
            classes.push(Matching::new(g, edges).map_err(|e| fail(Stage::Completion, e.to_string()))?);
        }
    }
    Ok(OneFactorization::new(classes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ClassCount { expected: usize, found: usize },
    UnknownEdge { class: usize, edge: EdgeId },
    NotAnEdge { u: Vertex, v: Vertex },
    ColorOutOfRange { u: Vertex, v: Vertex, color: usize },
    Duplicate { edge: EdgeId, first: usize, second: usize },
    NotPerfect { class: usize, vertex: Vertex },
    Missing { edge: EdgeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ClassCount { expected, found } => write!(f, "expected {expected} classes, found {found}"),
            Violation::UnknownEdge { class, edge } => write!(f, "class {class} names unknown edge id {edge}"),
            Violation::NotAnEdge { u, v } => write!(f, "{u}-{v} is not an edge of the graph"),
            Violation::ColorOutOfRange { u, v, color } => write!(f, "edge {u}-{v} has color {color} out of range"),
            Violation::Duplicate { edge, first, second } => {
                write!(f, "disjointness: edge {edge} lies in classes {first} and {second}")
            }
            Violation::NotPerfect { class, vertex } => {
                write!(f, "class {class} is not a perfect matching at vertex {vertex}")
            }
            Violation::Missing { edge } => write!(f, "edge {edge} is in no class"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Violation),
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        *self == Verdict::Accept
    }
}

/// Accepts iff there are exactly `d` classes, pairwise disjoint, each a
/// perfect matching, together covering every edge. Checks run in that order
/// and the first violation is reported.
pub fn verify_factorization(g: &Graph, f: &OneFactorization) -> Verdict {
    let d = g.max_degree();
    let regular = g.regular_degree().is_some();
    if !regular || f.len() != d {
        return Verdict::Reject(Violation::ClassCount { expected: d, found: f.len() });
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.m()];
    for (k, class) in f.classes.iter().enumerate() {
        for &e in class.edges() {
            if e >= g.m() {
                return Verdict::Reject(Violation::UnknownEdge { class: k, edge: e });
            }
            if let Some(first) = owner[e] {
                return Verdict::Reject(Violation::Duplicate { edge: e, first, second: k });
            }
            owner[e] = Some(k);
        }
    }
    for (k, class) in f.classes.iter().enumerate() {
        let mut hits = vec![0u32; g.n()];
        for &e in class.edges() {
            let (u, v) = g.edge(e);
            hits[u] += 1;
            hits[v] += 1;
        }
        if let Some(vertex) = hits.iter().position(|&h| h != 1) {
            return Verdict::Reject(Violation::NotPerfect { class: k, vertex });
        }
    }
    match owner.iter().position(Option::is_none) {
        Some(edge) => Verdict::Reject(Violation::Missing { edge }),
        None => Verdict::Accept,
    }
}

/// Verifies `u v k` triples. Classes are built without the usual matching
/// checks so that every defect reaches the verifier.
pub fn verify_triples(g: &Graph, triples: &[(Vertex, Vertex, usize)]) -> Verdict {
    let d = g.max_degree();
    let mut classes = vec![Vec::new(); d];
    for &(u, v, k) in triples {
        let Some(e) = (u < g.n() && v < g.n()).then(|| g.find_edge(u, v)).flatten() else {
            return Verdict::Reject(Violation::NotAnEdge { u, v });
        };
        if k >= d {
            return Verdict::Reject(Violation::ColorOutOfRange { u, v, color: k });
        }
        classes[k].push(e);
    }
    let mut seen = vec![None; g.m()];
    for (k, class) in classes.iter().enumerate() {
        for &e in class {
            if let Some(first) = seen[e] {
                return Verdict::Reject(Violation::Duplicate { edge: e, first, second: k });
            }
            seen[e] = Some(k);
        }
    }
    let classes = classes
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            Matching::from_sorted_unchecked(c)
        })
        .collect();
    verify_factorization(g, &OneFactorization::new(classes))
}

/// Factorization file: `#` header lines, then `u v k` per edge in edge-id order.
pub fn write_factorization(g: &Graph, f: &OneFactorization, header: &[(String, String)]) -> String {
    let mut out = String::new();
    for (key, value) in header {
        writeln!(out, "# {key} {value}").unwrap();
    }
    let colors = f.edge_colors(g.m());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let k = colors[e].expect("factorization covers every edge");
        writeln!(out, "{u} {v} {k}").unwrap();
    }
    out
}

pub fn read_factorization(text: &str) -> Result<Vec<(Vertex, Vertex, usize)>, FormatError> {
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let [u, v, k] = parse_fields::<3>(line, idx + 1)?;
        triples.push((u, v, k));
    }
    Ok(triples)
}

/// Natural logarithms of the counting bounds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CountingBounds {
    /// `(dn/2)·ln((1−ε)d/(2e²))`.
    pub lower: f64,
    /// `(dn/2)·ln(d/e²)`, a lower-order factor `(1+o(1))^{dn/2}` left out.
    pub upper: f64,
    pub upper_omits_lower_order: bool,
    /// `k·(2·ln r! − r·ln r)` for an r-regular bipartite graph with sides of size k.
    pub schrijver: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("d must be at least 1")]
    ZeroDegree,
    #[error("n must be even, got {0}")]
    OddOrder(usize),
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("Schrijver bound needs a positive degree")]
    ZeroSchrijverDegree,
}

fn ln_factorial(r: usize) -> f64 {
    (2..=r).map(|i| (i as f64).ln()).sum()
}

pub fn counting_bounds(
    n: usize,
    d: usize,
    epsilon: f64,
    k: Option<usize>,
    r: Option<usize>,
) -> Result<CountingBounds, BoundsError> {
    if d == 0 {
        return Err(BoundsError::ZeroDegree);
    }
    if n % 2 == 1 {
        return Err(BoundsError::OddOrder(n));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BoundsError::Epsilon(epsilon));
    }
    let (dd, half) = (d as f64, (d * n) as f64 / 2.0);
    let e2 = std::f64::consts::E.powi(2);
    let schrijver = match k {
        Some(k) => {
            let r = r.unwrap_or(d);
            if r == 0 {
                return Err(BoundsError::ZeroSchrijverDegree);
            }
            Some(k as f64 * (2.0 * ln_factorial(r) - r as f64 * (r as f64).ln()))
        }
        None => None,
    };
    Ok(CountingBounds {
        lower: half * ((1.0 - epsilon) * dd / (2.0 * e2)).ln(),
        upper: half * (dd / e2).ln(),
        upper_omits_lower_order: true,
        schrijver,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::petersen;

    fn t1() -> PipelineConfig {
        PipelineConfig { t: 1, ..PipelineConfig::default() }
    }

    #[test]
    fn small_complete_graphs() {
        let k4 = factorize(&Graph::complete(4), &t1()).unwrap();
        assert_eq!(k4.result.unwrap().len(), 3);
        for t in [1, 3] {
            let cfg = PipelineConfig { t, ..PipelineConfig::default() };
            let out = factorize(&Graph::complete(6), &cfg).unwrap();
            let f = out.result.unwrap();
            assert_eq!(f.len(), 5);
            assert!(verify_factorization(&Graph::complete(6), &f).accepted());
        }
    }

    #[test]
    fn petersen_always_fails() {
        for seed in 0..5 {
            let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
            let out = factorize(&petersen(), &cfg).unwrap();
            assert!(!out.is_success());
        }
    }

    #[test]
    fn bipartite_shortcut() {
        let out = factorize(&Graph::cycle(8), &PipelineConfig::default()).unwrap();
        assert_eq!(out.stats.shortcut, Some("bipartite"));
        assert_eq!(out.result.unwrap().len(), 2);
    }

    #[test]
    fn input_errors() {
        let path = Graph::new(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(factorize(&path, &t1()).unwrap_err(), InputError::NotRegular);
        assert_eq!(factorize(&Graph::cycle(5), &t1()).unwrap_err(), InputError::OddOrder(5));
        let even_t = PipelineConfig { t: 2, ..PipelineConfig::default() };
        assert_eq!(factorize(&Graph::complete(4), &even_t).unwrap_err(), InputError::BadT(2));
    }

    #[test]
    fn deterministic_output() {
        let g = Graph::complete(10);
        let cfg = PipelineConfig { seed: 9, ..PipelineConfig::default() };
        let a = factorize(&g, &cfg).unwrap().result.unwrap();
        let b = factorize(&g, &cfg).unwrap().result.unwrap();
        assert_eq!(write_factorization(&g, &a, &[]), write_factorization(&g, &b, &[]));
    }

    fn k4_factorization() -> (Graph, OneFactorization) {
        let g = Graph::complete(4);
        let class = |pairs: [(usize, usize); 2]| {
            Matching::new(&g, pairs.iter().map(|&(u, v)| g.find_edge(u, v).unwrap()).collect()).unwrap()
        };
        let f = OneFactorization::new(vec![class([(0, 1), (2, 3)]), class([(0, 2), (1, 3)]), class([(0, 3), (1, 2)])]);
        (g, f)
    }

    #[test]
    fn verifier_examples() {
        let (g, f) = k4_factorization();
        assert_eq!(verify_factorization(&g, &f), Verdict::Accept);

        let mut dup = f.clone();
        let e = dup.classes[0].edges()[0];
        let mut edges = dup.classes[1].edges().to_vec();
        edges.push(e);
        edges.sort_unstable();
        dup.classes[1] = Matching::from_sorted_unchecked(edges);
        assert!(
            matches!(verify_factorization(&g, &dup), Verdict::Reject(Violation::Duplicate { edge, .. }) if edge == e)
        );

        let mut short = f.clone();
        let kept = short.classes[2].edges()[1];
        short.classes[2] = Matching::from_sorted_unchecked(vec![kept]);
        assert!(matches!(verify_factorization(&g, &short), Verdict::Reject(Violation::NotPerfect { class: 2, .. })));

        let fewer = OneFactorization::new(f.classes[..2].to_vec());
        assert_eq!(verify_factorization(&g, &fewer), Verdict::Reject(Violation::ClassCount { expected: 3, found: 2 }));
    }

    #[test]
    fn file_round_trip() {
        let (g, f) = k4_factorization();
        let text = write_factorization(&g, &f, &[("n".into(), "4".into())]);
        assert!(text.starts_with("# n 4\n"));
        let triples = read_factorization(&text).unwrap();
        assert_eq!(triples.len(), 6);
        assert_eq!(verify_triples(&g, &triples), Verdict::Accept);

        let mut bad = triples.clone();
        bad[0] = (0, 0, 1);
        assert_eq!(verify_triples(&g, &bad), Verdict::Reject(Violation::NotAnEdge { u: 0, v: 0 }));
        bad[0] = (triples[0].0, triples[0].1, 3);
        assert!(matches!(verify_triples(&g, &bad), Verdict::Reject(Violation::ColorOutOfRange { color: 3, .. })));
        assert!(read_factorization("0 1\n").is_err());
    }

    #[test]
    fn bounds_values() {
        let b = counting_bounds(6, 3, 0.5, Some(3), None).unwrap();
        assert!((b.schrijver.unwrap() - 3.0 * (36.0f64 / 27.0).ln()).abs() < 1e-12);
        let b4 = counting_bounds(8, 4, 0.5, Some(4), None).unwrap();
        assert!((b4.schrijver.unwrap() - 4.0 * (576.0f64 / 256.0).ln()).abs() < 1e-12);
        let lower = counting_bounds(10, 4, 0.2, None, None).unwrap().lower;
        assert!((lower - 20.0 * (0.8 * 4.0 / (2.0 * std::f64::consts::E.powi(2))).ln()).abs() < 1e-12);
        assert_eq!(counting_bounds(4, 3, 1.0, None, None), Err(BoundsError::Epsilon(1.0)));
        assert_eq!(counting_bounds(5, 3, 0.5, None, None), Err(BoundsError::OddOrder(5)));
    }
}
