//! Absorbing the internal edges of a regular graph `R` on `A ∪ B` into
//! perfect matchings.
//!
//! Each round takes equal-size matchings `M_A ⊆ R[A]` and `M_B ⊆ R[B]`,
//! extends `M_A ∪ M_B` by a perfect matching of the crossing layer on the
//! vertices they leave uncovered, and deletes the resulting perfect matching
//! from `R`. Once `R[A]` and `R[B]` are empty the rest is regular bipartite
//! and is factorized by repeated perfect matchings.

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::coloring::{
    bipartite_one_factorization, equalize_matching_pairs, equitable_classes, reduce_colors, vizing_edge_coloring,
    EdgeColoring,
};
use crate::graph::{EdgeId, Graph, Matching, OneFactorization, Vertex};
use crate::matching::{perfect_matching_or_witness, BipartiteView, HallWitness, PerfectMatchingOutcome, Side};
use crate::seed::{derived_rng, Rng};

/// How each round picks the internal matchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CarvePolicy {
    /// Color `R[A]` and `R[B]` equitably over one common palette, so that
    /// paired classes have equal size and are used whole.
    Equitable,
    /// Equalize Vizing classes by splitting, then carve random degree-bounded
    /// sub-matchings of size `⌊α·f/(2r₂)⌋` (at least one edge).
    Proof,
}

impl std::str::FromStr for CarvePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equitable" => Ok(CarvePolicy::Equitable),
            "proof" => Ok(CarvePolicy::Proof),
            _ => Err(format!("unknown carve policy `{s}` (expected equitable or proof)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CompletionConfig {
    pub alpha: f64,
    /// Degree bound for carved sub-matchings, as a fraction of `r₁`.
    pub beta: f64,
    pub submatch_retries: usize,
    pub split_k: usize,
    /// Defaults to `e(R[A]) + r` when unset.
    pub max_rounds: Option<usize>,
    pub carve: CarvePolicy,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta: 0.15,
            submatch_retries: 16,
            split_k: 1,
            max_rounds: None,
            carve: CarvePolicy::Equitable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompletionError {
    #[error("R is not regular")]
    NotRegular,
    #[error("the view must split all {n} vertices into equal halves")]
    BadSides { n: usize },
    #[error("e(R[A]) = {a} but e(R[B]) = {b}")]
    Imbalance { a: usize, b: usize },
    #[error("internal edges need {needed} more rounds but only {available} remain")]
    Overfull { needed: usize, available: usize },
    #[error("round {round}: no perfect matching of the crossing layer ({} {:?} vertices see {} neighbours)", .witness.set.len(), .witness.side, .witness.neighborhood.len())]
    ExtensionFailed { round: usize, witness: HallWitness },
    #[error("no sub-matching within the degree bound after {retries} tries (vertex {vertex} sees {count} > {bound})")]
    SubmatchingRetries { retries: usize, vertex: Vertex, count: usize, bound: usize },
    #[error("gave up after {0} rounds")]
    MaxRounds(usize),
    #[error("remainder is not regular bipartite")]
    RemainderNotRegular,
}

/// Largest number of `h`-neighbours any vertex has among `covered`, with that vertex.
fn worst_exposure(h: &BipartiteView, covered: &[bool]) -> (usize, Vertex) {
    let g = h.host();
    let mut count = vec![0usize; g.n()];
    for &e in h.edges() {
        let (u, v) = g.edge(e);
        if covered[v] {
            count[u] += 1;
        }
        if covered[u] {
            count[v] += 1;
        }
    }
    let v = (0..g.n()).max_by_key(|&v| (count[v], std::cmp::Reverse(v))).unwrap_or(0);
    (count.get(v).copied().unwrap_or(0), v)
}

fn covered_by(g: &Graph, edges: &[EdgeId]) -> Vec<bool> {
    let mut covered = vec![false; g.n()];
    for &e in edges {
        let (u, v) = g.edge(e);
        covered[u] = true;
        covered[v] = true;
    }
    covered
}

/// A uniformly random `size`-edge sub-matching of `m` in which no vertex
/// has more than `bound` neighbours in `h` among the covered vertices.
pub fn bounded_submatching(
    m: &Matching,
    size: usize,
    h: &BipartiteView,
    bound: usize,
    retries: usize,
    rng: &mut Rng,
) -> Result<Matching, CompletionError> {
    assert!(size <= m.len(), "sub-matching of size {size} from {} edges", m.len());
    let mut edges = m.edges().to_vec();
    let mut worst = (0, 0);
    for _ in 0..retries.max(1) {
        let (chosen, _) = edges.partial_shuffle(rng, size);
        let mut pick = chosen.to_vec();
        pick.sort_unstable();
        worst = worst_exposure(h, &covered_by(h.host(), &pick));
        if worst.0 <= bound {
            return Ok(Matching::from_sorted_unchecked(pick));
        }
    }
    Err(CompletionError::SubmatchingRetries { retries: retries.max(1), vertex: worst.1, count: worst.0, bound })
}

/// Splits `m` into at most `k` matchings. Consecutive blocks of `k` edges
/// are labelled by independent random permutations of `0..k`; the labelling
/// is redrawn until no piece exposes a vertex to more than `bound` of its
/// `h`-neighbours. A matching with fewer than `bound / 2` edges is returned
/// whole.
pub fn split_matching(
    m: &Matching,
    k: usize,
    h: &BipartiteView,
    bound: usize,
    retries: usize,
    rng: &mut Rng,
) -> Result<Vec<Matching>, CompletionError> {
    if k <= 1 || (m.len() as f64) < bound as f64 / 2.0 {
        return Ok(vec![m.clone()]);
    }
    let mut labels: Vec<usize> = (0..k).collect();
    let mut worst = (0, 0);
    for _ in 0..retries.max(1) {
        let mut pieces = vec![Vec::new(); k];
        for block in m.edges().chunks(k) {
            labels.shuffle(rng);
            for (&e, &l) in block.iter().zip(&labels) {
                pieces[l].push(e);
            }
        }
        worst =
            pieces.iter().map(|p| worst_exposure(h, &covered_by(h.host(), p))).max_by_key(|w| w.0).unwrap_or((0, 0));
        if worst.0 <= bound {
            return Ok(pieces.into_iter().filter(|p| !p.is_empty()).map(Matching::from_sorted_unchecked).collect());
        }
    }
    Err(CompletionError::SubmatchingRetries { retries: retries.max(1), vertex: worst.1, count: worst.0, bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub factorization: OneFactorization,
    /// Absorption rounds, one per class emitted before the bipartite finish.
    pub rounds: usize,
    /// Times the internal colorings were redrawn after failed extensions.
    pub recolorings: usize,
    /// Whether `r₂ ≤ α⁵·r₁ / ln r₁` held on input (r₁ = degree of H, r₂ = largest internal degree).
    pub sparsity_hypothesis: bool,
}

struct SideColoring {
    sub: Graph,
    coloring: EdgeColoring,
    ids: Vec<EdgeId>,
}

impl SideColoring {
    /// Color classes in host edge ids; with a palette, rebalanced equitably onto it.
    fn classes(&self, palette: Option<usize>) -> Vec<Matching> {
        let classes = match palette {
            Some(k) => equitable_classes(&self.sub, &self.coloring, k),
            None => self.coloring.classes(),
        };
        classes
            .into_iter()
            .map(|c| {
                let mut edges: Vec<EdgeId> = c.edges().iter().map(|&e| self.ids[e]).collect();
                edges.sort_unstable();
                Matching::from_sorted_unchecked(edges)
            })
            .collect()
    }
}

struct State<'g> {
    r: &'g Graph,
    in_a: Vec<bool>,
    a: Vec<Vertex>,
    b: Vec<Vertex>,
    alive: Vec<bool>,
    classes: Vec<Matching>,
}

impl<'g> State<'g> {
    fn internal(&self, side_a: bool) -> Vec<EdgeId> {
        (0..self.r.m())
            .filter(|&e| {
                let (u, v) = self.r.edge(e);
                self.alive[e] && self.in_a[u] == side_a && self.in_a[v] == side_a
            })
            .collect()
    }

    /// Proper coloring of the internal edges on one side. A shuffled edge
    /// order gives a different coloring.
    fn color_side(&self, side_a: bool, rng: Option<&mut Rng>) -> SideColoring {
        let mut ids = self.internal(side_a);
        if let Some(rng) = rng {
            ids.shuffle(rng);
        }
        let pairs: Vec<(Vertex, Vertex)> = ids.iter().map(|&e| self.r.edge(e)).collect();
        let sub = Graph::new(self.r.n(), &pairs).expect("subgraph of a simple graph");
        let coloring = reduce_colors(&sub, &vizing_edge_coloring(&sub));
        SideColoring { sub, coloring, ids }
    }

    fn max_internal_degree(&self) -> usize {
        let mut deg = vec![0usize; self.r.n()];
        for e in (0..self.r.m()).filter(|&e| self.alive[e]) {
            let (u, v) = self.r.edge(e);
            if self.in_a[u] == self.in_a[v] {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Tries to complete `internal` to a perfect matching of the current graph.
    fn extend(&self, internal: &[EdgeId]) -> Result<Matching, HallWitness> {
        let covered = covered_by(self.r, internal);
        let layer: Vec<EdgeId> = (0..self.r.m())
            .filter(|&e| {
                let (u, v) = self.r.edge(e);
                self.alive[e] && self.in_a[u] != self.in_a[v] && !covered[u] && !covered[v]
            })
            .collect();
        let a: Vec<Vertex> = self.a.iter().copied().filter(|&v| !covered[v]).collect();
        let b: Vec<Vertex> = self.b.iter().copied().filter(|&v| !covered[v]).collect();
        let view = BipartiteView::new(self.r, a, b, layer).expect("layer edges cross the sides");
        match perfect_matching_or_witness(&view) {
            PerfectMatchingOutcome::Perfect(pm) => {
                let mut edges = internal.to_vec();
                edges.extend_from_slice(pm.edges());
                Ok(Matching::new(self.r, edges).expect("disjoint vertex sets"))
            }
            PerfectMatchingOutcome::Deficient(w) => Err(w),
        }
    }

    fn emit(&mut self, class: Matching) {
        debug_assert!(class.is_perfect(self.r));
        for &e in class.edges() {
            self.alive[e] = false;
        }
        self.classes.push(class);
    }
}

/// 1-factorization of an r-regular graph `R = h.host()` whose vertex set is
/// split into the two sides of `h`; `h` is the bipartite part used for the
/// degree bounds of the proof-style carving.
pub fn absorb_internal_edges(
    h: &BipartiteView,
    cfg: &CompletionConfig,
    seed: u64,
) -> Result<Completion, CompletionError> {
    let r = h.host();
    let n = r.n();
    let d = r.regular_degree().ok_or(CompletionError::NotRegular)?;
    if h.a().len() != h.b().len() || h.a().len() + h.b().len() != n {
        return Err(CompletionError::BadSides { n });
    }
    let mut in_a = vec![false; n];
    h.a().iter().for_each(|&v| in_a[v] = true);
    let mut st = State { r, in_a, a: h.a().to_vec(), b: h.b().to_vec(), alive: vec![true; r.m()], classes: Vec::new() };

    let r1 = h.max_degree();
    let r2 = st.max_internal_degree();
    let sparsity_hypothesis = r1 > 1 && (r2 as f64) <= cfg.alpha.powi(5) * r1 as f64 / (r1 as f64).ln();
    let max_rounds = cfg.max_rounds.unwrap_or(st.internal(true).len() + d);
    let mut rng = derived_rng(seed, "completion", 0);
    let mut recolorings = 0;

    match cfg.carve {
        CarvePolicy::Equitable => equitable_rounds(&mut st, d, cfg, max_rounds, &mut rng, &mut recolorings)?,
        CarvePolicy::Proof => proof_rounds(&mut st, d, h, cfg, max_rounds, &mut rng)?,
    }
    let rounds = st.classes.len();

    let rest: Vec<EdgeId> = (0..r.m()).filter(|&e| st.alive[e]).collect();
    let view =
        BipartiteView::new(r, st.a.clone(), st.b.clone(), rest).map_err(|_| CompletionError::RemainderNotRegular)?;
    if view.regular_degree() != Some(d - rounds) {
        return Err(CompletionError::RemainderNotRegular);
    }
    let finish = bipartite_one_factorization(&view).map_err(|_| CompletionError::RemainderNotRegular)?;
    st.classes.extend(finish.classes);
    Ok(Completion { factorization: OneFactorization::new(st.classes), rounds, recolorings, sparsity_hypothesis })
}

fn check_balance(st: &State) -> Result<usize, CompletionError> {
    let (a, b) = (st.internal(true).len(), st.internal(false).len());
    if a != b {
        return Err(CompletionError::Imbalance { a, b });
    }
    Ok(a)
}

/// Equal-size class pairs from equitable colorings of both sides over a
/// common palette, largest first. Empty pairs are dropped. With an rng, each
/// side keeps the smallest palette among a few shuffled colorings.
fn equitable_pairs(st: &State, mut rng: Option<&mut Rng>) -> Vec<(Matching, Matching)> {
    const TRIES: usize = 4;
    let color = |side_a: bool, rng: Option<&mut Rng>| match rng {
        None => st.color_side(side_a, None),
        Some(rng) => (0..TRIES).map(|_| st.color_side(side_a, Some(&mut *rng))).min_by_key(|c| c.coloring.k).unwrap(),
    };
    let sa = color(true, rng.as_deref_mut());
    let sb = color(false, rng.as_deref_mut());
    let k = sa.coloring.k.max(sb.coloring.k);
    let (mut ca, mut cb) = (sa.classes(Some(k)), sb.classes(Some(k)));
    if let Some(rng) = rng {
        ca.shuffle(rng);
        cb.shuffle(rng);
    }
    ca.sort_by_key(|m| std::cmp::Reverse(m.len()));
    cb.sort_by_key(|m| std::cmp::Reverse(m.len()));
    ca.into_iter().zip(cb).filter(|(x, _)| !x.is_empty()).collect()
}

fn fits(r: &Graph, m: &Matching, e: EdgeId) -> bool {
    let (u, v) = r.edge(e);
    m.edges().iter().all(|&f| {
        let (x, y) = r.edge(f);
        x != u && x != v && y != u && y != v
    })
}

fn with_edge(r: &Graph, m: &Matching, e: EdgeId) -> Matching {
    let mut edges = m.edges().to_vec();
    edges.push(e);
    Matching::new(r, edges).expect("checked by fits")
}

fn equitable_rounds(
    st: &mut State,
    d: usize,
    cfg: &CompletionConfig,
    max_rounds: usize,
    rng: &mut Rng,
    recolorings: &mut usize,
) -> Result<(), CompletionError> {
    check_balance(st)?;
    let mut pending = equitable_pairs(st, Some(rng));
    let mut redraws = 0;
    loop {
        if pending.is_empty() {
            if st.internal(true).is_empty() {
                return Ok(());
            }
            // edges dropped by repairs are colored afresh
            pending = equitable_pairs(st, Some(rng));
        }
        if st.classes.len() >= max_rounds {
            return Err(CompletionError::MaxRounds(st.classes.len()));
        }
        let available = d - st.classes.len();
        if pending.len() > available {
            return Err(CompletionError::Overfull { needed: pending.len(), available });
        }
        let mut last = None;
        let mut done = None;
        for (i, (ma, mb)) in pending.iter().enumerate() {
            debug_assert_eq!(ma.len(), mb.len());
            match extend_with_repair(st, ma.edges(), mb.edges()) {
                Ok(class) => {
                    done = Some((i, class));
                    break;
                }
                Err(w) => last = Some(w),
            }
        }
        match done {
            Some((i, (class, dropped))) => {
                pending.remove(i);
                st.emit(class);
                check_balance(st)?;
                // a dropped pair moves to a later round when both edges fit there
                for (ea, eb) in dropped {
                    if let Some(p) = pending.iter_mut().find(|(ma, mb)| fits(st.r, ma, ea) && fits(st.r, mb, eb)) {
                        *p = (with_edge(st.r, &p.0, ea), with_edge(st.r, &p.1, eb));
                    }
                }
            }
            None if redraws < cfg.submatch_retries => {
                redraws += 1;
                *recolorings += 1;
                pending = equitable_pairs(st, Some(rng));
            }
            None => {
                return Err(CompletionError::ExtensionFailed { round: st.classes.len(), witness: last.unwrap() });
            }
        }
    }
}

/// Extends `ma ∪ mb`, dropping one internal edge from each side whenever the
/// crossing layer has a Hall violator `X`: on the far side the edge whose
/// endpoints see most of `X`, on the near side the edge whose endpoints see
/// fewest uncovered far vertices. Dropped edges stay in the graph. Gives up
/// when half of the pair has been dropped. Returns the dropped `(A, B)` edges.
fn extend_with_repair(
    st: &State,
    ma: &[EdgeId],
    mb: &[EdgeId],
) -> Result<(Matching, Vec<(EdgeId, EdgeId)>), HallWitness> {
    let (mut sa, mut sb) = (ma.to_vec(), mb.to_vec());
    let budget = ma.len() / 2;
    let mut dropped = Vec::new();
    loop {
        let mut internal = sa.clone();
        internal.extend_from_slice(&sb);
        let w = match st.extend(&internal) {
            Ok(class) => return Ok((class, dropped)),
            Err(w) => w,
        };
        if dropped.len() >= budget || sa.is_empty() {
            return Err(w);
        }
        let (near, far) = match w.side {
            Side::A => (&mut sa, &mut sb),
            Side::B => (&mut sb, &mut sa),
        };
        let mut in_x = vec![false; st.r.n()];
        w.set.iter().for_each(|&x| in_x[x] = true);
        let seen =
            |v: Vertex, mark: &[bool]| st.r.neighbors(v).iter().filter(|&&(u, e)| st.alive[e] && mark[u]).count();
        let far_score = |e: EdgeId| {
            let (u, v) = st.r.edge(e);
            seen(u, &in_x) + seen(v, &in_x)
        };
        let pos = (0..far.len()).max_by_key(|&i| (far_score(far[i]), std::cmp::Reverse(far[i]))).unwrap();
        let far_edge = far.remove(pos);
        let mut uncovered_far = vec![false; st.r.n()];
        let covered = covered_by(st.r, far);
        let far_side_a = w.side == Side::B;
        (0..st.r.n()).for_each(|v| uncovered_far[v] = st.in_a[v] == far_side_a && !covered[v]);
        let near_score = |e: EdgeId| {
            let (u, v) = st.r.edge(e);
            seen(u, &uncovered_far) + seen(v, &uncovered_far)
        };
        let pos = (0..near.len()).min_by_key(|&i| (near_score(near[i]), near[i])).unwrap();
        let near_edge = near.remove(pos);
        dropped.push(if w.side == Side::A { (near_edge, far_edge) } else { (far_edge, near_edge) });
    }
}

fn proof_rounds(
    st: &mut State,
    d: usize,
    h: &BipartiteView,
    cfg: &CompletionConfig,
    max_rounds: usize,
    rng: &mut Rng,
) -> Result<(), CompletionError> {
    let bound = (cfg.beta * h.max_degree() as f64).ceil() as usize;
    loop {
        let f = check_balance(st)?;
        if f == 0 {
            return Ok(());
        }
        if st.classes.len() >= max_rounds || st.classes.len() >= d {
            return Err(CompletionError::MaxRounds(st.classes.len()));
        }
        let ca = st.color_side(true, None).classes(None);
        let cb = st.color_side(false, None).classes(None);
        let pairs = equalize_matching_pairs(ca, cb).map_err(|_| CompletionError::Imbalance { a: f, b: f })?;
        let (ma, mb) = &pairs[0];
        let r2 = st.max_internal_degree().max(1);
        let size = ((cfg.alpha * f as f64 / (2.0 * r2 as f64)).floor() as usize).min(ma.len()).max(1);

        let mut last = None;
        let mut class = None;
        for _ in 0..cfg.submatch_retries.max(1) {
            let (mut sa, mut sb) = if cfg.split_k > 1 {
                let pa = split_matching(ma, cfg.split_k, h, bound, cfg.submatch_retries, rng)?;
                let pb = split_matching(mb, cfg.split_k, h, bound, cfg.submatch_retries, rng)?;
                (pa[0].clone(), pb[0].clone())
            } else {
                (ma.clone(), mb.clone())
            };
            let s = size.min(sa.len()).min(sb.len());
            sa = bounded_submatching(&sa, s, h, bound, cfg.submatch_retries, rng)?;
            sb = bounded_submatching(&sb, s, h, bound, cfg.submatch_retries, rng)?;
            let mut internal = sa.into_edges();
            internal.extend(sb.into_edges());
            match st.extend(&internal) {
                Ok(c) => {
                    class = Some(c);
                    break;
                }
                Err(w) => last = Some(w),
            }
        }
        match class {
            Some(c) => st.emit(c),
            None => return Err(CompletionError::ExtensionFailed { round: st.classes.len(), witness: last.unwrap() }),
        }
    }
}
