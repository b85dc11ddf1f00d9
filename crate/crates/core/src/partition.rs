//! Random balanced bipartitions and the edge assignment that turns them into
//! edge-disjoint balanced bipartite pieces `H_1, …, H_t`.
//!
//! An edge may cross none of the `t` bipartitions. Such edges belong to no
//! piece; [`CoverPolicy`] decides whether that rejects the plan or leaves
//! them to the caller (the pipeline hands them to the remainder graph).

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::matching::{min_degree_perfect_matching, BipartiteView, ConditionCheck, ConditionWitness};
use crate::seed::{derived_rng, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Auto,
    Dense,
    Sparse,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Mode::Auto),
            "dense" => Ok(Mode::Dense),
            "sparse" => Ok(Mode::Sparse),
            _ => Err(format!("unknown mode `{s}` (expected auto, dense or sparse)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverPolicy {
    /// An edge crossing no bipartition rejects the plan.
    Reject,
    /// Such edges stay unassigned.
    Remainder,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PartitionConfig {
    pub t: usize,
    pub mode: Mode,
    /// Multiplier applied to the R1, R2 and S4 windows.
    pub slack: f64,
    pub max_retries: usize,
    /// Subsets examined per piece by the S2/S3/S5 audits above 16 vertices.
    pub sample_count: usize,
    pub cover: CoverPolicy,
    /// Improve each dense bisection by cut-increasing pair swaps.
    pub refine: bool,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            t: 3,
            mode: Mode::Auto,
            slack: 3.0,
            max_retries: 64,
            sample_count: 200,
            cover: CoverPolicy::Remainder,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("balanced bipartitions need an even number of vertices, got {0}")]
    OddOrder(usize),
    #[error("at least one piece is required")]
    NoPieces,
    #[error("graph is not regular")]
    NotRegular,
    #[error("sparse construction needs auxiliary minimum degree {required}, found {found}")]
    SparsePrecondition { found: usize, required: usize },
    #[error("{property} still violated after {attempts} attempts: {detail}")]
    RetriesExhausted { property: &'static str, attempts: usize, detail: String },
    #[error("edge {edge} crosses none of the bipartitions")]
    EmptyCover { edge: EdgeId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    pub t: usize,
    /// `sides[i][v]` is true when `v ∈ A_i`.
    pub sides: Vec<Vec<bool>>,
    /// `c(e)`, or `None` when `e` crosses no bipartition.
    pub assignment: Vec<Option<usize>>,
    pub mode: Mode,
    /// Bipartition samples drawn before the R1/R2 gates passed.
    pub attempts: usize,
}

impl PartitionPlan {
    pub fn piece_edges(&self, i: usize) -> Vec<EdgeId> {
        (0..self.assignment.len()).filter(|&e| self.assignment[e] == Some(i)).collect()
    }

    pub fn unassigned(&self) -> Vec<EdgeId> {
        (0..self.assignment.len()).filter(|&e| self.assignment[e].is_none()).collect()
    }

    pub fn view<'g>(&self, g: &'g Graph, i: usize) -> BipartiteView<'g> {
        BipartiteView::with_edges(g, &self.sides[i], self.piece_edges(i)).expect("plan edges cross their bipartition")
    }

    /// `piece vertex side` lines (side 0 = A) followed by `edge piece` lines;
    /// unassigned edges get piece `-`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, side) in self.sides.iter().enumerate() {
            for (v, &a) in side.iter().enumerate() {
                writeln!(out, "{i} {v} {}", u8::from(!a)).unwrap();
            }
        }
        for (e, c) in self.assignment.iter().enumerate() {
            match c {
                Some(i) => writeln!(out, "{e} {i}").unwrap(),
                None => writeln!(out, "{e} -").unwrap(),
            }
        }
        out
    }
}

fn crossing_degrees(g: &Graph, side: &[bool]) -> Vec<usize> {
    (0..g.n()).map(|v| g.neighbors(v).iter().filter(|&&(w, _)| side[w] != side[v]).count()).collect()
}

/// `|C(e)|` for every edge.
fn cover_counts(g: &Graph, sides: &[Vec<bool>]) -> Vec<usize> {
    g.edges().iter().map(|&(u, v)| sides.iter().filter(|s| s[u] != s[v]).count()).collect()
}

/// A measured deviation against the window `center ± radius·slack`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: f64,
    pub radius: f64,
    pub slack: f64,
    pub max_deviation: f64,
}

impl Window {
    pub fn allowed(&self) -> f64 {
        self.radius * self.slack
    }

    pub fn holds(&self) -> bool {
        self.max_deviation <= self.allowed() + 1e-9
    }
}

fn window(center: f64, radius: f64, slack: f64, values: impl Iterator<Item = f64>) -> Window {
    let max_deviation = values.map(|x| (x - center).abs()).fold(0.0, f64::max);
    Window { center, radius, slack, max_deviation }
}

fn r1_window(g: &Graph, d: usize, sides: &[Vec<bool>], slack: f64) -> Window {
    let dd = d as f64;
    let values: Vec<f64> = sides.iter().flat_map(|s| crossing_degrees(g, s)).map(|c| c as f64).collect();
    window(dd / 2.0, dd.powf(2.0 / 3.0), slack, values.into_iter())
}

fn r2_window(g: &Graph, sides: &[Vec<bool>], slack: f64) -> Window {
    let t = sides.len() as f64;
    window(t / 2.0, t.powf(2.0 / 3.0), slack, cover_counts(g, sides).into_iter().map(|c| c as f64))
}

fn gate(g: &Graph, d: usize, sides: &[Vec<bool>], slack: f64) -> Result<(), (&'static str, String)> {
    let r1 = r1_window(g, d, sides, slack);
    if !r1.holds() {
        return Err(("R1", format!("crossing degree deviates by {} > {}", r1.max_deviation, r1.allowed())));
    }
    let r2 = r2_window(g, sides, slack);
    if !r2.holds() {
        return Err(("R2", format!("|C(e)| deviates by {} > {}", r2.max_deviation, r2.allowed())));
    }
    Ok(())
}

fn check_input(g: &Graph, t: usize) -> Result<usize, PartitionError> {
    if g.n() % 2 == 1 {
        return Err(PartitionError::OddOrder(g.n()));
    }
    if t == 0 {
        return Err(PartitionError::NoPieces);
    }
    g.regular_degree().ok_or(PartitionError::NotRegular)
}

fn resample(
    g: &Graph,
    d: usize,
    cfg: &PartitionConfig,
    seed: u64,
    tag: &str,
    mut draw: impl FnMut(&mut Rng) -> Vec<bool>,
) -> Result<(Vec<Vec<bool>>, usize), PartitionError> {
    let mut last = ("R1", String::new());
    for attempt in 0..cfg.max_retries.max(1) {
        let mut rng = derived_rng(seed, tag, attempt as u64);
        let sides: Vec<Vec<bool>> = (0..cfg.t).map(|_| draw(&mut rng)).collect();
        match gate(g, d, &sides, cfg.slack) {
            Ok(()) => return Ok((sides, attempt + 1)),
            Err(e) => last = e,
        }
    }
    Err(PartitionError::RetriesExhausted { property: last.0, attempts: cfg.max_retries.max(1), detail: last.1 })
}

/// `cfg.t` independent uniform balanced bipartitions, resampled together
/// until R1 and R2 hold. Returns the sides and the number of samples drawn.
pub fn balanced_bipartitions_dense(
    g: &Graph,
    cfg: &PartitionConfig,
    seed: u64,
) -> Result<(Vec<Vec<bool>>, usize), PartitionError> {
    let d = check_input(g, cfg.t)?;
    let n = g.n();
    let mut order: Vec<Vertex> = (0..n).collect();
    resample(g, d, cfg, seed, "dense-bipartition", |rng| {
        order.shuffle(rng);
        let mut side = vec![false; n];
        order[..n / 2].iter().for_each(|&v| side[v] = true);
        if cfg.refine {
            refine_cut(g, &mut side);
        }
        side
    })
}

/// Swaps pairs `a ∈ A`, `b ∈ B` while some swap increases the number of
/// crossing edges. With `D(v)` = internal minus crossing degree, swapping
/// gains `D(a) + D(b) − 2·[ab ∈ E]`; only the few largest `D` on each side
/// are considered.
pub fn refine_cut(g: &Graph, side: &mut [bool]) {
    const TOP: usize = 8;
    let n = g.n();
    let mut diff: Vec<i64> =
        (0..n).map(|v| g.neighbors(v).iter().map(|&(w, _)| if side[w] == side[v] { 1 } else { -1 }).sum()).collect();
    let top = |diff: &[i64], side: &[bool], want: bool| {
        let mut vs: Vec<Vertex> = (0..n).filter(|&v| side[v] == want).collect();
        let k = TOP.min(vs.len());
        if k > 0 {
            vs.select_nth_unstable_by(k - 1, |&x, &y| diff[y].cmp(&diff[x]).then(x.cmp(&y)));
            vs.truncate(k);
        }
        vs
    };
    loop {
        let (ta, tb) = (top(&diff, side, true), top(&diff, side, false));
        let mut best: Option<(i64, Vertex, Vertex)> = None;
        for &a in &ta {
            for &b in &tb {
                let gain = diff[a] + diff[b] - if g.has_edge(a, b) { 2 } else { 0 };
                if gain > 0
                    && best.is_none_or(|(bg, ba, bb)| {
                        (gain, std::cmp::Reverse((a, b))) > (bg, std::cmp::Reverse((ba, bb)))
                    })
                {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { break };
        side[a] = !side[a];
        side[b] = !side[b];
        let touched = [a, b].into_iter().chain(g.neighbors(a).iter().chain(g.neighbors(b)).map(|&(w, _)| w));
        for v in touched {
            diff[v] = g.neighbors(v).iter().map(|&(w, _)| if side[w] == side[v] { 1 } else { -1 }).sum();
        }
    }
}

/// Pairs of vertices at distance at least 3, forming a perfect matching.
pub fn sparse_pairs(g: &Graph) -> Result<Vec<(Vertex, Vertex)>, PartitionError> {
    let n = g.n();
    let mut close = vec![vec![false; n]; n];
    for v in 0..n {
        close[v][v] = true;
        for &(w, _) in g.neighbors(v) {
            close[v][w] = true;
            for &(x, _) in g.neighbors(w) {
                close[v][x] = true;
            }
        }
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !close[u][v] {
                pairs.push((u, v));
            }
        }
    }
    let aux = Graph::new(n, &pairs).expect("auxiliary graph is simple");
    let required = n.div_ceil(2);
    if aux.min_degree() < required {
        return Err(PartitionError::SparsePrecondition { found: aux.min_degree(), required });
    }
    let m = min_degree_perfect_matching(&aux)
        .map_err(|_| PartitionError::SparsePrecondition { found: aux.min_degree(), required })?;
    Ok(m.edges().iter().map(|&e| aux.edge(e)).collect())
}

/// Bipartitions built from a fixed pairing of far-apart vertices: for every
/// piece and pair, an independent coin decides which vertex goes to A.
pub fn balanced_bipartitions_sparse(
    g: &Graph,
    cfg: &PartitionConfig,
    seed: u64,
) -> Result<(Vec<Vec<bool>>, usize), PartitionError> {
    let d = check_input(g, cfg.t)?;
    let pairs = sparse_pairs(g)?;
    let n = g.n();
    resample(g, d, cfg, seed, "sparse-bipartition", |rng| {
        let mut side = vec![false; n];
        for &(x, y) in &pairs {
            side[if rng.gen::<bool>() { x } else { y }] = true;
        }
        side
    })
}

/// Samples `c(e)` uniformly from `C(e) = {i : e crosses (A_i, B_i)}`.
pub fn assign_edges(
    g: &Graph,
    sides: &[Vec<bool>],
    cover: CoverPolicy,
    rng: &mut Rng,
) -> Result<Vec<Option<usize>>, PartitionError> {
    let mut assignment = Vec::with_capacity(g.m());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let c: Vec<usize> = (0..sides.len()).filter(|&i| sides[i][u] != sides[i][v]).collect();
        match c.choose(rng) {
            Some(&i) => assignment.push(Some(i)),
            None if cover == CoverPolicy::Remainder => assignment.push(None),
            None => return Err(PartitionError::EmptyCover { edge: e }),
        }
    }
    Ok(assignment)
}

/// Bipartitions (dense or sparse per `cfg.mode`) plus edge assignment. Under
/// [`CoverPolicy::Reject`] an empty `C(e)` triggers a fresh sample.
pub fn partition(g: &Graph, cfg: &PartitionConfig, seed: u64) -> Result<PartitionPlan, PartitionError> {
    let d = check_input(g, cfg.t)?;
    let mode = match cfg.mode {
        Mode::Auto if d * d <= g.n() / 2 => Mode::Sparse,
        Mode::Auto => Mode::Dense,
        m => m,
    };
    let mut attempts = 0;
    let mut last = PartitionError::NoPieces;
    for round in 0..cfg.max_retries.max(1) {
        let round_seed = crate::seed::derive(seed, "plan", round as u64);
        let drawn = match mode {
            Mode::Sparse => match balanced_bipartitions_sparse(g, cfg, round_seed) {
                Err(PartitionError::SparsePrecondition { .. }) if cfg.mode == Mode::Auto => {
                    balanced_bipartitions_dense(g, cfg, round_seed).map(|s| (s, Mode::Dense))
                }
                other => other.map(|s| (s, Mode::Sparse)),
            },
            _ => balanced_bipartitions_dense(g, cfg, round_seed).map(|s| (s, Mode::Dense)),
        };
        let ((sides, n_attempts), used) = drawn?;
        attempts += n_attempts;
        let mut rng = derived_rng(round_seed, "assign", 0);
        match assign_edges(g, &sides, cfg.cover, &mut rng) {
            Ok(assignment) => return Ok(PartitionPlan { t: cfg.t, sides, assignment, mode: used, attempts }),
            Err(e) => last = e,
        }
    }
    Err(PartitionError::RetriesExhausted { property: "S1", attempts, detail: last.to_string() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct S1Report {
    /// Every assigned edge crosses its own piece's bipartition and every
    /// bipartition is balanced. A hard requirement.
    pub disjoint_crossing: bool,
    /// Every edge is assigned to some piece.
    pub exhaustive: bool,
    /// First offending edge (a misassigned one, else an unassigned one).
    pub witness: Option<EdgeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionDiagnostics {
    pub r1: Window,
    pub r2: Window,
    pub s1: S1Report,
    pub s2: ConditionCheck,
    pub s3: ConditionCheck,
    pub s4: Window,
    pub s5: ConditionCheck,
    /// Whether S2, S3 and S5 covered every subset.
    pub exhaustive: bool,
}

pub const EXHAUSTIVE_PARTITION_LIMIT: usize = 16;

fn s1_report(g: &Graph, plan: &PartitionPlan) -> S1Report {
    let balanced = plan.sides.iter().all(|s| 2 * s.iter().filter(|&&a| a).count() == g.n());
    let bad = (0..g.m()).find(|&e| match plan.assignment[e] {
        Some(i) => {
            let (u, v) = g.edge(e);
            i >= plan.sides.len() || plan.sides[i][u] == plan.sides[i][v]
        }
        None => false,
    });
    let missing = plan.assignment.iter().position(Option::is_none);
    S1Report { disjoint_crossing: balanced && bad.is_none(), exhaustive: missing.is_none(), witness: bad.or(missing) }
}

/// Counts `|N_H(y) ∩ X|` for every vertex `y`, ranked descending.
fn ranked_weights(h_adj: &[Vec<Vertex>], x: &[Vertex], candidates: &[Vertex]) -> Vec<(usize, Vertex)> {
    let mut w = vec![0usize; h_adj.len()];
    for &v in x {
        h_adj[v].iter().for_each(|&y| w[y] += 1);
    }
    let mut ranked: Vec<(usize, Vertex)> = candidates.iter().map(|&y| (w[y], y)).collect();
    ranked.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    ranked
}

fn sets(x: &[Vertex], ys: &[(usize, Vertex)], edges: usize, bound: f64) -> ConditionWitness {
    let mut y: Vec<Vertex> = ys.iter().map(|&(_, v)| v).collect();
    y.sort_unstable();
    ConditionWitness::Sets { x: x.to_vec(), y, edges, bound }
}

fn subsets(pool: &[Vertex], exhaustive: bool, samples: usize, rng: &mut Rng) -> Vec<Vec<Vertex>> {
    if exhaustive {
        return (1u64..(1u64 << pool.len()))
            .map(|mask| (0..pool.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pool[i]).collect())
            .collect();
    }
    if pool.is_empty() {
        return Vec::new();
    }
    let mut p = pool.to_vec();
    (0..samples)
        .map(|_| {
            let k = rng.gen_range(1..=p.len());
            p.shuffle(rng);
            let mut x = p[..k].to_vec();
            x.sort_unstable();
            x
        })
        .collect()
}

/// Evaluates R1, R2 and S1–S5 for a plan. Set conditions are exact for each
/// `X` examined: the extremal `Y` of each size comes from ranking vertices
/// by their number of neighbours in `X`.
pub fn partition_diagnostics(
    g: &Graph,
    plan: &PartitionPlan,
    cfg: &PartitionConfig,
    seed: u64,
) -> PartitionDiagnostics {
    let n = g.n();
    let d = g.max_degree();
    let (dd, nn, tt) = (d as f64, n as f64, plan.t as f64);
    let alpha = 0.1;
    let small = nn / (2.0 * tt * tt);
    let exhaustive = n <= EXHAUSTIVE_PARTITION_LIMIT;
    let mut rng = derived_rng(seed, "diagnostics", 0);

    let mut s4_values = Vec::new();
    let (mut s2, mut s3, mut s5) = (ConditionCheck::pass(), ConditionCheck::pass(), ConditionCheck::pass());
    for i in 0..plan.t {
        let side = &plan.sides[i];
        let mut h_adj = vec![Vec::new(); n];
        for e in plan.piece_edges(i) {
            let (u, v) = g.edge(e);
            h_adj[u].push(v);
            h_adj[v].push(u);
        }
        s4_values.extend(h_adj.iter().map(|a| a.len() as f64));
        let a: Vec<Vertex> = (0..n).filter(|&v| side[v]).collect();
        let b: Vec<Vertex> = (0..n).filter(|&v| !side[v]).collect();
        let all: Vec<Vertex> = (0..n).collect();

        for x in subsets(&a, exhaustive, cfg.sample_count, &mut rng) {
            let k = x.len();
            let ranked = ranked_weights(&h_adj, &x, &b);
            if s2.holds && (k as f64) <= small && k <= b.len() {
                let e: usize = ranked[..k].iter().map(|p| p.0).sum();
                let bound = dd * k as f64 / (tt * tt);
                if e as f64 >= bound {
                    s2 = ConditionCheck::fail(sets(&x, &ranked[..k], e, bound));
                }
            }
            if s3.holds && (k as f64) > small {
                let mut e = 0;
                for j in 1..=b.len() {
                    e += ranked[b.len() - j].0;
                    if (j as f64) <= small || (k + j) as f64 <= nn / 2.0 {
                        continue;
                    }
                    let bound = 2.0 * (dd / tt) * (1.0 - 8.0 / tt.cbrt()) * (k * j) as f64 / nn;
                    if (e as f64) < bound {
                        s3 = ConditionCheck::fail(sets(&x, &ranked[b.len() - j..], e, bound));
                        break;
                    }
                }
            }
        }
        if s5.holds {
            for x in subsets(&all, exhaustive, cfg.sample_count, &mut rng) {
                let k = x.len();
                if (k as f64) < small || k as f64 > nn / 4.0 {
                    continue;
                }
                let ranked = ranked_weights(&h_adj, &x, &all);
                let e: usize = ranked[..k].iter().map(|p| p.0).sum();
                let bound = (1.0 - 4.0 * alpha) * (dd / tt) * k as f64;
                if e as f64 > bound {
                    s5 = ConditionCheck::fail(sets(&x, &ranked[..k], e, bound));
                    break;
                }
            }
        }
    }

    PartitionDiagnostics {
        r1: r1_window(g, d, &plan.sides, cfg.slack),
        r2: r2_window(g, &plan.sides, cfg.slack),
        s1: s1_report(g, plan),
        s2,
        s3,
        s4: window(dd / tt, 8.0 * dd / tt.powf(4.0 / 3.0), cfg.slack, s4_values.into_iter()),
        s5,
        exhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: usize) -> PartitionConfig {
        PartitionConfig { t, ..PartitionConfig::default() }
    }

    fn is_balanced(side: &[bool]) -> bool {
        2 * side.iter().filter(|&&a| a).count() == side.len()
    }

    #[test]
    fn single_dense_bipartition() {
        let g = Graph::complete(8);
        let (sides, attempts) = balanced_bipartitions_dense(&g, &cfg(1), 4).unwrap();
        assert_eq!(sides.len(), 1);
        assert!(is_balanced(&sides[0]));
        assert_eq!(attempts, 1);
    }

    #[test]
    fn refinement_reaches_a_swap_local_optimum() {
        let cut = |g: &Graph, side: &[bool]| g.edges().iter().filter(|&&(u, v)| side[u] != side[v]).count();
        for g in [Graph::cycle(8), Graph::complete(6), crate::generators::petersen()] {
            let mut side: Vec<bool> = (0..g.n()).map(|v| v < g.n() / 2).collect();
            let before = cut(&g, &side);
            refine_cut(&g, &mut side);
            assert!(is_balanced(&side));
            let after = cut(&g, &side);
            assert!(after >= before);
            for a in (0..g.n()).filter(|&v| side[v]) {
                for b in (0..g.n()).filter(|&v| !side[v]) {
                    let mut s = side.clone();
                    s.swap(a, b);
                    assert!(cut(&g, &s) <= after);
                }
            }
        }
    }

    #[test]
    fn k8_three_pieces_r1() {
        let g = Graph::complete(8);
        let (sides, _) = balanced_bipartitions_dense(&g, &cfg(3), 1).unwrap();
        // every balanced bipartition of K_8 gives crossing degree exactly 4
        let r1 = r1_window(&g, 7, &sides, 3.0);
        assert_eq!(r1.max_deviation, 0.5);
        assert!(r1.holds());
    }

    #[test]
    fn odd_order_rejected() {
        assert_eq!(balanced_bipartitions_dense(&Graph::complete(5), &cfg(1), 0), Err(PartitionError::OddOrder(5)));
        assert_eq!(partition(&Graph::cycle(7), &cfg(1), 0), Err(PartitionError::OddOrder(7)));
    }

    #[test]
    fn sparse_cycle() {
        let g = Graph::cycle(12);
        let pairs = sparse_pairs(&g).unwrap();
        assert_eq!(pairs.len(), 6);
        let (sides, _) = balanced_bipartitions_sparse(&g, &cfg(2), 9).unwrap();
        for side in &sides {
            assert!(is_balanced(side));
            for &(x, y) in &pairs {
                assert_ne!(side[x], side[y]);
            }
        }
        let plan = partition(&g, &cfg(2), 9).unwrap();
        assert_eq!(plan.mode, Mode::Sparse);
    }

    #[test]
    fn sparse_precondition() {
        assert!(matches!(
            balanced_bipartitions_sparse(&Graph::complete(8), &cfg(1), 0),
            Err(PartitionError::SparsePrecondition { .. })
        ));
        // auto mode picks dense for K_8
        assert_eq!(partition(&Graph::complete(8), &cfg(1), 0).unwrap().mode, Mode::Dense);
    }

    #[test]
    fn forced_assignment() {
        let g = Graph::new(4, &[(0, 2)]).unwrap();
        let sides = vec![vec![true, true, true, false], vec![true, true, false, false], vec![true, false, true, false]];
        let mut rng = crate::seed::rng(0);
        let a = assign_edges(&g, &sides, CoverPolicy::Reject, &mut rng).unwrap();
        assert_eq!(a, vec![Some(1)]);
        let none = vec![vec![true, true, true, false]];
        assert_eq!(assign_edges(&g, &none, CoverPolicy::Reject, &mut rng), Err(PartitionError::EmptyCover { edge: 0 }));
        assert_eq!(assign_edges(&g, &none, CoverPolicy::Remainder, &mut rng), Ok(vec![None]));
    }

    #[test]
    fn k6_plan_is_deterministic_and_partitions() {
        let g = Graph::complete(6);
        let strict = PartitionConfig { t: 3, cover: CoverPolicy::Reject, ..PartitionConfig::default() };
        let a = partition(&g, &strict, 11).unwrap();
        let b = partition(&g, &strict, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
        let mut all: Vec<EdgeId> = (0..3).flat_map(|i| a.piece_edges(i)).collect();
        all.sort_unstable();
        assert_eq!(all, (0..15).collect::<Vec<_>>());
        let diag = partition_diagnostics(&g, &a, &strict, 0);
        assert!(diag.s1.disjoint_crossing && diag.s1.exhaustive);
        assert!(diag.exhaustive);
    }

    #[test]
    fn corrupted_plan_has_s1_witness() {
        let g = Graph::complete(6);
        let mut plan = partition(&g, &cfg(1), 2).unwrap();
        let inside = (0..g.m())
            .find(|&e| {
                let (u, v) = g.edge(e);
                plan.sides[0][u] == plan.sides[0][v]
            })
            .unwrap();
        plan.assignment[inside] = Some(0);
        let diag = partition_diagnostics(&g, &plan, &cfg(1), 0);
        assert!(!diag.s1.disjoint_crossing);
        assert_eq!(diag.s1.witness, Some(inside));
    }

    #[test]
    fn s4_window_for_k8() {
        let g = Graph::complete(8);
        let plan = partition(&g, &cfg(1), 5).unwrap();
        let diag = partition_diagnostics(&g, &plan, &cfg(1), 0);
        assert_eq!(diag.s4.center, 7.0);
        assert_eq!(diag.s4.radius, 56.0);
        // crossing degree of K_8 is 4 everywhere
        assert_eq!(diag.s4.max_deviation, 3.0);
        assert!(diag.s4.holds());
    }

    #[test]
    fn plan_text_format() {
        let g = Graph::cycle(4);
        let plan = partition(&g, &cfg(1), 0).unwrap();
        let text = plan.to_text();
        assert_eq!(text.lines().count(), 4 + 4);
        assert!(text.lines().take(4).all(|l| l.split(' ').count() == 3));
    }
}
