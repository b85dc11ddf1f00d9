//! Immutable simple undirected graphs with stable edge identifiers.
//!
//! Vertices are dense integers `0..n`. Edge ids are assigned in input order
//! and are the common currency between modules: matchings, factors and
//! colorings are all sets of edge ids of some host graph.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    Loop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    Duplicate(Vertex, Vertex),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("edge id {id} out of range for m = {m}")]
    EdgeOutOfRange { id: EdgeId, m: usize },
    #[error("edge set is not a matching: vertex {0} covered twice")]
    NotAMatching(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header line \"n m\"")]
    MissingHeader,
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCount { declared: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<(Vertex, EdgeId)>>,
}

/// Edge-id correspondence between a derived graph and the graph it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRemap {
    /// Indexed by new edge id.
    pub to_old: Vec<EdgeId>,
    /// Indexed by old edge id; `None` for edges that were dropped.
    pub to_new: Vec<Option<EdgeId>>,
}

impl Graph {
    /// Builds a validated simple graph. Edge `i` of the result is `pairs[i]`,
    /// stored with its endpoints in the given order.
    pub fn new(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashMap::with_capacity(pairs.len());
        for (id, &(u, v)) in pairs.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            if seen.insert((u.min(v), u.max(v)), id).is_some() {
                return Err(GraphError::Duplicate(u, v));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        Ok(Self { n, edges: pairs.to_vec(), adj })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        Self::new(n, &pairs).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &pairs).expect("cycle is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> (Vertex, Vertex) {
        self.edges[id]
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Returns `d` when every vertex has degree `d`. The empty graph on zero
    /// vertices is reported as 0-regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn find_edge(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.find_edge(u, v).is_some()
    }

    pub fn other_end(&self, id: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[id];
        if a == v {
            b
        } else {
            a
        }
    }

    fn check_ids(&self, ids: &[EdgeId]) -> Result<(), GraphError> {
        match ids.iter().find(|&&e| e >= self.m()) {
            Some(&id) => Err(GraphError::EdgeOutOfRange { id, m: self.m() }),
            None => Ok(()),
        }
    }

    /// New graph on the same vertex set keeping only `keep`, in the order given.
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> Result<(Graph, EdgeRemap), GraphError> {
        self.check_ids(keep)?;
        let mut to_new = vec![None; self.m()];
        let mut pairs = Vec::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            if to_new[old].is_some() {
                let (u, v) = self.edges[old];
                return Err(GraphError::Duplicate(u, v));
            }
            to_new[old] = Some(new);
            pairs.push(self.edges[old]);
        }
        let g = Graph::new(self.n, &pairs)?;
        Ok((g, EdgeRemap { to_old: keep.to_vec(), to_new }))
    }

    /// Removes the given edges. Surviving edges keep their relative order, so
    /// new id `i` is the `i`-th surviving old id.
    pub fn subtract_edges(&self, remove: &[EdgeId]) -> Result<(Graph, EdgeRemap), GraphError> {
        self.check_ids(remove)?;
        let mut dropped = vec![false; self.m()];
        for &e in remove {
            dropped[e] = true;
        }
        let keep: Vec<EdgeId> = (0..self.m()).filter(|&e| !dropped[e]).collect();
        self.edge_subgraph(&keep)
    }

    /// Two-colors the graph if it is bipartite. Each component's lowest
    /// vertex is placed on side `false`.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        let mut stack = Vec::new();
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            stack.push(s);
            while let Some(u) = stack.pop() {
                let su = side[u].unwrap();
                for &(w, _) in &self.adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            stack.push(w);
                        }
                        Some(sw) if sw == su => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    /// Serializes in the edge-list format: `n m` then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(8 * (self.m() + 1));
        writeln!(out, "{} {}", self.n, self.m()).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, FormatError> {
        let mut header: Option<(usize, usize)> = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = parse_fields::<2>(line, idx + 1)?;
            if header.is_none() {
                header = Some((nums[0], nums[1]));
            } else {
                pairs.push((nums[0], nums[1]));
            }
        }
        let (n, m) = header.ok_or(FormatError::MissingHeader)?;
        if pairs.len() != m {
            return Err(FormatError::EdgeCount { declared: m, found: pairs.len() });
        }
        Ok(Graph::new(n, &pairs)?)
    }
}

pub(crate) fn parse_fields<const K: usize>(line: &str, lineno: usize) -> Result<[usize; K], FormatError> {
    let mut out = [0usize; K];
    let mut fields = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok =
            fields.next().ok_or_else(|| FormatError::Syntax { line: lineno, msg: format!("expected {K} fields") })?;
        *slot = tok
            .parse()
            .map_err(|_| FormatError::Syntax { line: lineno, msg: format!("not a non-negative integer: {tok:?}") })?;
    }
    if fields.next().is_some() {
        return Err(FormatError::Syntax { line: lineno, msg: format!("expected {K} fields") });
    }
    Ok(out)
}

/// A set of pairwise vertex-disjoint edges, kept sorted by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(g: &Graph, mut edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        g.check_ids(&edges)?;
        edges.sort_unstable();
        edges.dedup();
        let mut used = vec![false; g.n()];
        for &e in &edges {
            let (u, v) = g.edge(e);
            for w in [u, v] {
                if std::mem::replace(&mut used[w], true) {
                    return Err(GraphError::NotAMatching(w));
                }
            }
        }
        Ok(Self { edges })
    }

    /// Wraps edge ids already known to form a matching.
    pub(crate) fn from_sorted_unchecked(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        Self { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<EdgeId> {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn covered(&self, g: &Graph) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self
            .edges
            .iter()
            .flat_map(|&e| {
                let (u, v) = g.edge(e);
                [u, v]
            })
            .collect();
        vs.sort_unstable();
        vs
    }

    pub fn is_perfect(&self, g: &Graph) -> bool {
        2 * self.len() == g.n()
    }

    /// Splits off the first `k` edges (in id order).
    pub fn split_front(self, k: usize) -> (Matching, Matching) {
        let mut front = self.edges;
        let back = front.split_off(k.min(front.len()));
        (Matching { edges: front }, Matching { edges: back })
    }
}

/// Ordered list of perfect matchings partitioning the edges of a host graph.
/// Classes refer to edge ids of the host; see `pipeline::verify_factorization`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OneFactorization {
    pub classes: Vec<Matching>,
}

impl OneFactorization {
    pub fn new(classes: Vec<Matching>) -> Self {
        Self { classes }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Color of every edge, or `None` for edges in no class.
    pub fn edge_colors(&self, m: usize) -> Vec<Option<usize>> {
        let mut colors = vec![None; m];
        for (k, class) in self.classes.iter().enumerate() {
            for &e in class.edges() {
                if e < m {
                    colors[e] = Some(k);
                }
            }
        }
        colors
    }
}
