//! Bipartite matchings, Hall witnesses and r-factors.
//!
//! A [`BipartiteView`] selects two disjoint vertex sets of a host graph and a
//! set of host edges running between them. Perfect matchings come from
//! Hopcroft–Karp; r-factors from a unit-capacity Dinic network
//! (source → A with capacity r, crossing edges with capacity 1, B → sink
//! with capacity r). Infeasibility is certified from the final residual
//! graph in both cases.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::graph::{EdgeId, Graph, Matching, Vertex};
use crate::seed::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("vertex {0} listed twice")]
    RepeatedVertex(Vertex),
    #[error("edge {0} does not run between the two sides")]
    NotCrossing(EdgeId),
    #[error("edge id {0} out of range")]
    EdgeOutOfRange(EdgeId),
    #[error("edge {0} listed twice")]
    RepeatedEdge(EdgeId),
}

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct BipartiteView<'g> {
    host: &'g Graph,
    a: Vec<Vertex>,
    b: Vec<Vertex>,
    edges: Vec<EdgeId>,
    // host vertex -> local index on its side, NONE when absent
    local: Vec<usize>,
    adj_a: Vec<Vec<(usize, EdgeId)>>,
    adj_b: Vec<Vec<(usize, EdgeId)>>,
}

impl<'g> BipartiteView<'g> {
    pub fn new(host: &'g Graph, a: Vec<Vertex>, b: Vec<Vertex>, edges: Vec<EdgeId>) -> Result<Self, ViewError> {
        let mut side = vec![None; host.n()];
        let mut local = vec![NONE; host.n()];
        for (s, set) in [(Side::A, &a), (Side::B, &b)] {
            for (i, &v) in set.iter().enumerate() {
                if v >= host.n() {
                    return Err(ViewError::VertexOutOfRange(v));
                }
                if side[v].is_some() {
                    return Err(ViewError::RepeatedVertex(v));
                }
                side[v] = Some(s);
                local[v] = i;
            }
        }
        let mut adj_a = vec![Vec::new(); a.len()];
        let mut adj_b = vec![Vec::new(); b.len()];
        let mut seen = vec![false; host.m()];
        for &e in &edges {
            if e >= host.m() {
                return Err(ViewError::EdgeOutOfRange(e));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(ViewError::RepeatedEdge(e));
            }
            let (u, v) = host.edge(e);
            let (x, y) = match (side[u], side[v]) {
                (Some(Side::A), Some(Side::B)) => (u, v),
                (Some(Side::B), Some(Side::A)) => (v, u),
                _ => return Err(ViewError::NotCrossing(e)),
            };
            adj_a[local[x]].push((local[y], e));
            adj_b[local[y]].push((local[x], e));
        }
        Ok(Self { host, a, b, edges, local, adj_a, adj_b })
    }

    /// All host edges crossing the split `in_a` / not `in_a`.
    pub fn crossing(host: &'g Graph, in_a: &[bool]) -> Self {
        let edges = (0..host.m())
            .filter(|&e| {
                let (u, v) = host.edge(e);
                in_a[u] != in_a[v]
            })
            .collect();
        Self::with_edges(host, in_a, edges).expect("crossing edges are valid")
    }

    /// The split `in_a` / not `in_a` of all host vertices with the given edges.
    pub fn with_edges(host: &'g Graph, in_a: &[bool], edges: Vec<EdgeId>) -> Result<Self, ViewError> {
        let (a, b): (Vec<Vertex>, Vec<Vertex>) = (0..host.n()).partition(|&v| in_a[v]);
        Self::new(host, a, b, edges)
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    pub fn a(&self) -> &[Vertex] {
        &self.a
    }

    pub fn b(&self) -> &[Vertex] {
        &self.b
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn is_balanced(&self) -> bool {
        self.a.len() == self.b.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.local[v] != NONE
    }

    pub fn degree(&self, v: Vertex) -> usize {
        let i = self.local[v];
        if i == NONE {
            0
        } else if self.a.get(i) == Some(&v) {
            self.adj_a[i].len()
        } else {
            self.adj_b[i].len()
        }
    }

    /// Neighbours of `v` inside the view, as host vertices.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let i = self.local[v];
        if i == NONE {
            Vec::new()
        } else if self.a.get(i) == Some(&v) {
            self.adj_a[i].iter().map(|&(j, _)| self.b[j]).collect()
        } else {
            self.adj_b[i].iter().map(|&(j, _)| self.a[j]).collect()
        }
    }

    fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adj_a.iter().chain(&self.adj_b).map(Vec::len)
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    /// `Some(r)` when the view is balanced and every vertex has degree `r`.
    pub fn regular_degree(&self) -> Option<usize> {
        if !self.is_balanced() {
            return None;
        }
        let r = self.degrees().next().unwrap_or(0);
        self.degrees().all(|d| d == r).then_some(r)
    }

    /// Same sides, restricted to `edges` (which must be a subset of the view's).
    pub fn restrict(&self, edges: Vec<EdgeId>) -> Result<BipartiteView<'g>, ViewError> {
        Self::new(self.host, self.a.clone(), self.b.clone(), edges)
    }
}

/// Hopcroft–Karp on local indices. Returns (mate of each A vertex, mate of each B vertex).
fn hopcroft_karp(adj_a: &[Vec<(usize, EdgeId)>], nb: usize) -> (Vec<usize>, Vec<usize>) {
    let na = adj_a.len();
    let mut mate_a = vec![NONE; na];
    let mut mate_b = vec![NONE; nb];
    let mut dist = vec![0usize; na];
    // greedy start
    for i in 0..na {
        if let Some(&(j, _)) = adj_a[i].iter().find(|&&(j, _)| mate_b[j] == NONE) {
            mate_a[i] = j;
            mate_b[j] = i;
        }
    }
    loop {
        let mut queue = VecDeque::new();
        for i in 0..na {
            if mate_a[i] == NONE {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = NONE;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &(j, _) in &adj_a[i] {
                let k = mate_b[j];
                if k == NONE {
                    found = true;
                } else if dist[k] == NONE {
                    dist[k] = dist[i] + 1;
                    queue.push_back(k);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; na];
        for i in 0..na {
            if mate_a[i] == NONE {
                augment(i, adj_a, &mut mate_a, &mut mate_b, &mut dist, &mut cursor);
            }
        }
    }
    (mate_a, mate_b)
}

fn augment(
    root: usize,
    adj_a: &[Vec<(usize, EdgeId)>],
    mate_a: &mut [usize],
    mate_b: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    // iterative layered DFS; `path` holds A vertices on the current branch
    let mut path = vec![root];
    while let Some(&i) = path.last() {
        if cursor[i] >= adj_a[i].len() {
            dist[i] = NONE;
            path.pop();
            continue;
        }
        let (j, _) = adj_a[i][cursor[i]];
        let k = mate_b[j];
        if k == NONE {
            // flip along the path
            for &p in path.iter().rev() {
                let (jj, _) = adj_a[p][cursor[p]];
                mate_a[p] = jj;
                mate_b[jj] = p;
            }
            return true;
        }
        if dist[k] != NONE && dist[k] == dist[i] + 1 {
            path.push(k);
        } else {
            cursor[i] += 1;
        }
    }
    false
}

fn matching_from_mates(view: &BipartiteView, mate_a: &[usize]) -> Matching {
    let edges = mate_a
        .iter()
        .enumerate()
        .filter(|&(_, &j)| j != NONE)
        .map(|(i, &j)| view.adj_a[i].iter().find(|&&(jj, _)| jj == j).map(|&(_, e)| e).unwrap())
        .collect();
    Matching::from_sorted_unchecked(edges)
}

pub fn max_bipartite_matching(view: &BipartiteView) -> Matching {
    let (mate_a, _) = hopcroft_karp(&view.adj_a, view.b.len());
    matching_from_mates(view, &mate_a)
}

/// A set `set` on one side with `|neighborhood| < |set|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallWitness {
    pub side: Side,
    pub set: Vec<Vertex>,
    pub neighborhood: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectMatchingOutcome {
    Perfect(Matching),
    Deficient(HallWitness),
}

/// Vertices of side `from` reachable by alternating paths from unmatched
/// vertices of that side, plus their neighbourhood on the other side.
fn alternating_reach(
    adj: &[Vec<(usize, EdgeId)>],
    mate: &[usize],
    mate_other: &[usize],
    n_other: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut seen = vec![false; adj.len()];
    let mut seen_other = vec![false; n_other];
    let mut queue: VecDeque<usize> = (0..adj.len()).filter(|&i| mate[i] == NONE).collect();
    for &i in &queue {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &(j, _) in &adj[i] {
            if !seen_other[j] {
                seen_other[j] = true;
                let k = mate_other[j];
                if k != NONE && !seen[k] {
                    seen[k] = true;
                    queue.push_back(k);
                }
            }
        }
    }
    let x = (0..adj.len()).filter(|&i| seen[i]).collect();
    let nx = (0..n_other).filter(|&j| seen_other[j]).collect();
    (x, nx)
}

/// A perfect matching, or a Hall-violating set read off the final
/// alternating-reachability structure of a maximum matching.
pub fn perfect_matching_or_witness(view: &BipartiteView) -> PerfectMatchingOutcome {
    let (mate_a, mate_b) = hopcroft_karp(&view.adj_a, view.b.len());
    let unmatched_a = mate_a.contains(&NONE);
    let unmatched_b = mate_b.contains(&NONE);
    if !unmatched_a && !unmatched_b {
        return PerfectMatchingOutcome::Perfect(matching_from_mates(view, &mate_a));
    }
    let (side, x, nx) = if unmatched_a {
        let (x, nx) = alternating_reach(&view.adj_a, &mate_a, &mate_b, view.b.len());
        (Side::A, x.iter().map(|&i| view.a[i]).collect(), nx.iter().map(|&j| view.b[j]).collect())
    } else {
        let (x, nx) = alternating_reach(&view.adj_b, &mate_b, &mate_a, view.a.len());
        (Side::B, x.iter().map(|&j| view.b[j]).collect(), nx.iter().map(|&i| view.a[i]).collect())
    };
    PerfectMatchingOutcome::Deficient(HallWitness { side, set: x, neighborhood: nx })
}

/// Spanning subgraph of a view in which every vertex has degree `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub edges: Vec<EdgeId>,
    pub r: usize,
}

impl Factor {
    pub fn is_valid_for(&self, view: &BipartiteView) -> bool {
        let host = view.host();
        let mut deg = vec![0usize; host.n()];
        for &e in &self.edges {
            if e >= host.m() {
                return false;
            }
            let (u, v) = host.edge(e);
            if !(view.contains(u) && view.contains(v)) {
                return false;
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        view.a().iter().chain(view.b()).all(|&v| deg[v] == self.r)
    }
}

/// `(x, y)` with `e(x, y) < r (|x| + |y| - m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaleRyserWitness {
    pub x: Vec<Vertex>,
    pub y: Vec<Vertex>,
    pub edges_between: usize,
    pub required: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("view is not balanced ({a} vs {b} vertices)")]
    Unbalanced { a: usize, b: usize },
    #[error("no {r}-factor: e(X,Y) = {} < {} for |X| = {}, |Y| = {}", .witness.edges_between, .witness.required, .witness.x.len(), .witness.y.len())]
    Infeasible { r: usize, witness: GaleRyserWitness },
}

#[derive(Clone)]
struct FactorNetwork {
    net: FlowNetwork,
    source_arcs: Vec<usize>,
    sink_arcs: Vec<usize>,
    // (arc, edge id)
    edge_arcs: Vec<(usize, EdgeId)>,
    flow: i64,
}

impl FactorNetwork {
    fn build(view: &BipartiteView, r: usize) -> Self {
        let (na, nb) = (view.a.len(), view.b.len());
        let (s, t) = (na + nb, na + nb + 1);
        let mut net = FlowNetwork::new(na + nb + 2);
        let source_arcs = (0..na).map(|i| net.add_arc(s, i, r as i64)).collect();
        let sink_arcs = (0..nb).map(|j| net.add_arc(na + j, t, r as i64)).collect();
        let mut edge_arcs = Vec::with_capacity(view.edges.len());
        for (i, nbrs) in view.adj_a.iter().enumerate() {
            for &(j, e) in nbrs {
                edge_arcs.push((net.add_arc(i, na + j, 1), e));
            }
        }
        Self { net, source_arcs, sink_arcs, edge_arcs, flow: 0 }
    }

    fn raise_to(&mut self, r: usize) {
        for &a in self.source_arcs.iter().chain(&self.sink_arcs) {
            self.net.set_capacity(a, r as i64);
        }
    }

    fn run(&mut self) -> i64 {
        let n = self.net.nodes();
        self.flow += self.net.augment(n - 2, n - 1);
        self.flow
    }

    fn factor(&self, r: usize) -> Factor {
        let mut edges: Vec<EdgeId> =
            self.edge_arcs.iter().filter(|&&(a, _)| self.net.flow(a) > 0).map(|&(_, e)| e).collect();
        edges.sort_unstable();
        Factor { edges, r }
    }

    fn witness(&self, view: &BipartiteView, r: usize) -> GaleRyserWitness {
        let na = view.a.len();
        let reach = self.net.residual_reachable(na + view.b.len());
        let x: Vec<Vertex> = (0..na).filter(|&i| reach[i]).map(|i| view.a[i]).collect();
        let y: Vec<Vertex> = (0..view.b.len()).filter(|&j| !reach[na + j]).map(|j| view.b[j]).collect();
        let edges_between = count_between(view, &x, &y);
        let required = r as i64 * (x.len() as i64 + y.len() as i64 - na as i64);
        GaleRyserWitness { x, y, edges_between, required }
    }
}

fn count_between(view: &BipartiteView, x: &[Vertex], y: &[Vertex]) -> usize {
    let host = view.host();
    let mut in_y = vec![false; host.n()];
    for &v in y {
        in_y[v] = true;
    }
    x.iter().map(|&u| view.neighbors(u).into_iter().filter(|&w| in_y[w]).count()).sum()
}

/// Exactly-`r`-regular spanning subgraph of a balanced view, or a
/// Gale–Ryser violating pair taken from the minimum cut.
pub fn r_factor(view: &BipartiteView, r: usize) -> Result<Factor, FactorError> {
    if !view.is_balanced() {
        return Err(FactorError::Unbalanced { a: view.a.len(), b: view.b.len() });
    }
    let mut fnet = FactorNetwork::build(view, r);
    if fnet.run() == (r * view.a.len()) as i64 {
        Ok(fnet.factor(r))
    } else {
        Err(FactorError::Infeasible { r, witness: fnet.witness(view, r) })
    }
}

/// Largest `r` admitting an r-factor, found by binary search over
/// `[0, min degree]` where each probe resumes from the last feasible flow.
pub fn max_feasible_factor(view: &BipartiteView) -> (usize, Factor) {
    if !view.is_balanced() {
        return (0, Factor { edges: Vec::new(), r: 0 });
    }
    let m = view.a.len();
    let mut best = FactorNetwork::build(view, 0);
    let (mut lo, mut hi) = (0usize, view.min_degree() + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let mut probe = best.clone();
        probe.raise_to(mid);
        if probe.run() == (mid * m) as i64 {
            lo = mid;
            best = probe;
        } else {
            hi = mid;
        }
    }
    (lo, best.factor(lo))
}

/// Parameters of the large-factor criterion (conditions P1–P4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorConditionParams {
    pub r: f64,
    pub phi: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionWitness {
    Vertex { vertex: Vertex, degree: usize, required: f64 },
    Sets { x: Vec<Vertex>, y: Vec<Vertex>, edges: usize, bound: f64 },
    Parameters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub holds: bool,
    pub witness: Option<ConditionWitness>,
}

impl ConditionCheck {
    pub(crate) fn pass() -> Self {
        Self { holds: true, witness: None }
    }

    pub(crate) fn fail(w: ConditionWitness) -> Self {
        Self { holds: false, witness: Some(w) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorConditionReport {
    pub p1: ConditionCheck,
    pub p2: ConditionCheck,
    pub p3: ConditionCheck,
    pub p4: ConditionCheck,
    /// Whether P2/P3 were checked over every subset pair.
    pub exhaustive: bool,
}

impl FactorConditionReport {
    pub fn all_hold(&self) -> bool {
        self.p1.holds && self.p2.holds && self.p3.holds && self.p4.holds
    }
}

/// Views with at most this many vertices get exhaustive subset checks.
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 16;

/// For `x` on side A: counts `|N(y) ∩ x|` for every B vertex, sorted descending,
/// paired with the B vertex.
fn weights_into_b(view: &BipartiteView, x_local: &[usize]) -> Vec<(usize, usize)> {
    let mut w = vec![0usize; view.b.len()];
    for &i in x_local {
        for &(j, _) in &view.adj_a[i] {
            w[j] += 1;
        }
    }
    let mut ranked: Vec<(usize, usize)> = w.into_iter().enumerate().map(|(j, c)| (c, j)).collect();
    ranked.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    ranked
}

/// Checks P1–P4 for a view. P2 and P3 enumerate every `X ⊆ A` when the view
/// has at most [`EXHAUSTIVE_VERTEX_LIMIT`] vertices and sample `samples`
/// subsets otherwise; for each `X` the extremal `Y` of every size is found
/// exactly by ranking B vertices by their number of neighbours in `X`.
pub fn check_factor_conditions(
    view: &BipartiteView,
    p: &FactorConditionParams,
    samples: usize,
    rng: &mut Rng,
) -> FactorConditionReport {
    let n_total = (view.a.len() + view.b.len()) as f64;
    let na = view.a.len();
    let nb = view.b.len();

    let need = p.r * (1.0 - p.beta1);
    let p1 = match view.a.iter().chain(&view.b).map(|&v| (v, view.degree(v))).find(|&(_, deg)| (deg as f64) < need) {
        Some((vertex, degree)) => ConditionCheck::fail(ConditionWitness::Vertex { vertex, degree, required: need }),
        None => ConditionCheck::pass(),
    };

    let p4 = if p.gamma >= p.beta3.max(p.beta1 + p.beta2) {
        ConditionCheck::pass()
    } else {
        ConditionCheck::fail(ConditionWitness::Parameters)
    };

    let small = p.r / p.phi;
    let exhaustive = na + nb <= EXHAUSTIVE_VERTEX_LIMIT;
    let subsets: Box<dyn Iterator<Item = Vec<usize>>> = if exhaustive {
        Box::new((1u64..(1u64 << na)).map(move |mask| (0..na).filter(|&i| mask >> i & 1 == 1).collect()))
    } else {
        let mut drawn = Vec::with_capacity(samples);
        let mut pool: Vec<usize> = (0..na).collect();
        for _ in 0..samples {
            if na == 0 {
                break;
            }
            let k = rng.gen_range(1..=na);
            pool.shuffle(rng);
            drawn.push(pool[..k].to_vec());
        }
        Box::new(drawn.into_iter())
    };

    let mut p2 = ConditionCheck::pass();
    let mut p3 = ConditionCheck::pass();
    for x in subsets {
        let ranked = weights_into_b(view, &x);
        let sx = x.len();
        let to_sets = |take: &[(usize, usize)], edges: usize, bound: f64| ConditionWitness::Sets {
            x: x.iter().map(|&i| view.a[i]).collect(),
            y: take.iter().map(|&(_, j)| view.b[j]).collect(),
            edges,
            bound,
        };
        if p2.holds && (sx as f64) <= small && sx <= nb {
            let top = &ranked[..sx];
            let e: usize = top.iter().map(|&(c, _)| c).sum();
            let bound = p.r * p.beta2 * sx as f64;
            if e as f64 >= bound {
                p2 = ConditionCheck::fail(to_sets(top, e, bound));
            }
        }
        if p3.holds && (sx as f64) > small {
            // bottom-k sums: walk the ranking from the tail
            let mut e = 0usize;
            for k in 1..=nb {
                e += ranked[nb - k].0;
                if (k as f64) <= small || (sx + k) as f64 <= n_total / 2.0 {
                    continue;
                }
                let bound = 2.0 * p.r * (1.0 - p.beta3) * (sx * k) as f64 / n_total;
                if (e as f64) < bound {
                    p3 = ConditionCheck::fail(to_sets(&ranked[nb - k..], e, bound));
                    break;
                }
            }
        }
        if !p2.holds && !p3.holds {
            break;
        }
    }
    FactorConditionReport { p1, p2, p3, p4, exhaustive }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinDegreeError {
    #[error("graph has an odd number of vertices ({0})")]
    OddOrder(usize),
    #[error("minimum degree {min} is below n/2 = {required}")]
    DegreeTooLow { min: usize, required: usize },
}

/// Perfect matching of a graph with `n` even and minimum degree at least
/// `n/2`: a greedy maximal matching, then for each pair of unmatched
/// vertices `x, y` a matched edge `uv` with `xu, yv` edges is rewired into
/// `xu, yv`. Such an edge always exists under the degree bound.
pub fn min_degree_perfect_matching(g: &Graph) -> Result<Matching, MinDegreeError> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(MinDegreeError::OddOrder(n));
    }
    if g.min_degree() * 2 < n {
        return Err(MinDegreeError::DegreeTooLow { min: g.min_degree(), required: n / 2 });
    }
    let mut mate = vec![NONE; n];
    for v in 0..n {
        if mate[v] == NONE {
            if let Some(&(w, _)) = g.neighbors(v).iter().find(|&&(w, _)| mate[w] == NONE) {
                mate[v] = w;
                mate[w] = v;
            }
        }
    }
    loop {
        let free: Vec<Vertex> = (0..n).filter(|&v| mate[v] == NONE).collect();
        let [x, y] = match free.as_slice() {
            [] => break,
            [x, y, ..] => [*x, *y],
            [_] => unreachable!("n is even"),
        };
        if g.has_edge(x, y) {
            mate[x] = y;
            mate[y] = x;
            continue;
        }
        let mut adj_x = vec![false; n];
        for &(w, _) in g.neighbors(x) {
            adj_x[w] = true;
        }
        let mut rewired = false;
        for &(u, _) in g.neighbors(y) {
            // y ~ u with u matched to v; need x ~ v
            let v = mate[u];
            if v != NONE && adj_x[v] {
                mate[x] = v;
                mate[v] = x;
                mate[y] = u;
                mate[u] = y;
                rewired = true;
                break;
            }
        }
        assert!(rewired, "degree bound guarantees a rewiring edge");
    }
    let edges = (0..n).filter(|&v| mate[v] > v).map(|v| g.find_edge(v, mate[v]).unwrap()).collect();
    Ok(Matching::from_sorted_unchecked(edges))
}
