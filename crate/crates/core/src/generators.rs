//! Test instance generators.
//!
//! Random d-regular graphs use the pairing model with point-pair rejection
//! (Steger–Wormald): points are paired one edge at a time and a pair that
//! would create a loop or a repeated edge is redrawn, with a full restart
//! only when no legal pair is left. Dense requests go through the
//! complement. Random bipartite regular graphs are unions of d perfect
//! matchings, each drawn from the complement of the edges chosen so far.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::matching::{max_bipartite_matching, BipartiteView};
use crate::seed::{derived_rng, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Complete,
    Cycle,
    RandomRegular,
    RandomBipartiteRegular,
    Petersen,
}

impl Model {
    pub const ALL: [Model; 5] =
        [Model::Complete, Model::Cycle, Model::RandomRegular, Model::RandomBipartiteRegular, Model::Petersen];

    pub fn name(self) -> &'static str {
        match self {
            Model::Complete => "complete",
            Model::Cycle => "cycle",
            Model::RandomRegular => "random-regular",
            Model::RandomBipartiteRegular => "random-bipartite-regular",
            Model::Petersen => "petersen",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Model::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown model `{s}`"))
    }
}

/// `d` is ignored by the complete, cycle and Petersen models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("n·d must be even (n = {n}, d = {d})")]
    Parity { n: usize, d: usize },
    #[error("degree {d} needs more than {n} vertices")]
    DegreeTooLarge { n: usize, d: usize },
    #[error("bipartite model needs an even n, got {0}")]
    OddBipartiteOrder(usize),
    #[error("a cycle needs at least 3 vertices, got {0}")]
    CycleTooShort(usize),
    #[error("no simple graph after {attempts} pairing attempts")]
    BudgetExhausted { attempts: usize },
}

pub fn generate(spec: GenSpec) -> Result<Graph, GenError> {
    let GenSpec { model, n, d, seed } = spec;
    let g = match model {
        Model::Complete => Graph::complete(n),
        Model::Cycle => {
            if n < 3 {
                return Err(GenError::CycleTooShort(n));
            }
            Graph::cycle(n)
        }
        Model::Petersen => petersen(),
        Model::RandomRegular => random_regular(n, d, seed)?,
        Model::RandomBipartiteRegular => random_bipartite_regular(n, d, seed)?,
    };
    debug_assert!(g.regular_degree().is_some());
    Ok(g)
}

pub fn petersen() -> Graph {
    let mut pairs = Vec::with_capacity(15);
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5));
        pairs.push((i, i + 5));
        pairs.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, &pairs).expect("Petersen graph is simple")
}

fn sorted_graph(n: usize, mut pairs: Vec<(Vertex, Vertex)>) -> Graph {
    for p in &mut pairs {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    pairs.sort_unstable();
    Graph::new(n, &pairs).expect("generator produced a simple graph")
}

fn complement_pairs(n: usize, adj: &[Vec<bool>], within: impl Fn(Vertex, Vertex) -> bool) -> Vec<(Vertex, Vertex)> {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if within(u, v) && !adj[u][v] {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

fn adjacency(n: usize, pairs: &[(Vertex, Vertex)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in pairs {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if (n * d) % 2 == 1 {
        return Err(GenError::Parity { n, d });
    }
    if d >= n && !(n == 0 && d == 0) {
        return Err(GenError::DegreeTooLarge { n, d });
    }
    if d == 0 {
        return Ok(Graph::empty(n));
    }
    let dc = n - 1 - d;
    if dc < d {
        let inner = random_regular(n, dc, seed)?;
        let adj = adjacency(n, inner.edges());
        return Ok(sorted_graph(n, complement_pairs(n, &adj, |_, _| true)));
    }
    let attempts = 10 * (d * d).max(1);
    for attempt in 0..attempts {
        let mut rng = derived_rng(seed, "pairing", attempt as u64);
        if let Some(pairs) = pairing_attempt(n, d, &mut rng) {
            return Ok(sorted_graph(n, pairs));
        }
    }
    Err(GenError::BudgetExhausted { attempts })
}

/// One run of the pairing process; `None` when it gets stuck.
fn pairing_attempt(n: usize, d: usize, rng: &mut Rng) -> Option<Vec<(Vertex, Vertex)>> {
    let mut free: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::with_capacity(d); n];
    let mut pairs = Vec::with_capacity(n * d / 2);
    while !free.is_empty() {
        let mut misses = 0;
        loop {
            let i = rng.gen_range(0..free.len());
            let j = rng.gen_range(0..free.len());
            let (u, v) = (free[i], free[j]);
            if i != j && u != v && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
                pairs.push((u, v));
                free.swap_remove(i.max(j));
                free.swap_remove(i.min(j));
                break;
            }
            misses += 1;
            if misses >= 64 {
                if !has_legal_pair(&free, &adj) {
                    return None;
                }
                misses = 0;
            }
        }
    }
    Some(pairs)
}

fn has_legal_pair(free: &[Vertex], adj: &[Vec<Vertex>]) -> bool {
    let mut vs = free.to_vec();
    vs.sort_unstable();
    vs.dedup();
    vs.iter().enumerate().any(|(i, &u)| vs[i + 1..].iter().any(|v| !adj[u].contains(v)))
}

/// Sides are `0..n/2` and `n/2..n`.
fn random_bipartite_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if n % 2 == 1 {
        return Err(GenError::OddBipartiteOrder(n));
    }
    let h = n / 2;
    if d > h {
        return Err(GenError::DegreeTooLarge { n, d });
    }
    let in_a: Vec<bool> = (0..n).map(|v| v < h).collect();
    let crossing = |u: Vertex, v: Vertex| in_a[u] != in_a[v];
    if h - d < d {
        let inner = random_bipartite_regular(n, h - d, seed)?;
        let adj = adjacency(n, inner.edges());
        return Ok(sorted_graph(n, complement_pairs(n, &adj, crossing)));
    }
    let mut rng = derived_rng(seed, "bipartite", 0);
    let mut adj = vec![vec![false; n]; n];
    let mut chosen = Vec::with_capacity(h * d);
    for _ in 0..d {
        // the complement is (h − k)-regular bipartite, so a perfect matching exists
        let mut options = complement_pairs(n, &adj, crossing);
        options.shuffle(&mut rng);
        let comp = Graph::new(n, &options).expect("complement is simple");
        let pm = max_bipartite_matching(&BipartiteView::crossing(&comp, &in_a));
        debug_assert_eq!(pm.len(), h);
        for &e in pm.edges() {
            let (u, v) = comp.edge(e);
            adj[u][v] = true;
            adj[v][u] = true;
            chosen.push((u, v));
        }
    }
    Ok(sorted_graph(n, chosen))
}
