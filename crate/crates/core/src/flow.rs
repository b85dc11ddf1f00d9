//! Dinic max-flow with level graphs and blocking flows.
//!
//! Arcs are stored in pairs: arc `2k` is the forward arc returned by
//! [`FlowNetwork::add_arc`], arc `2k + 1` its residual twin. Cloning a
//! network snapshots its flow, which `matching::max_feasible_factor` uses
//! to warm-start a binary search.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), out: vec![Vec::new(); nodes], level: vec![-1; nodes], cursor: vec![0; nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.out.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently routed through forward arc `arc`.
    pub fn flow(&self, arc: usize) -> i64 {
        self.arcs[arc ^ 1].cap
    }

    /// Changes the capacity of a forward arc, keeping its current flow.
    /// Panics if the new capacity is below that flow.
    pub fn set_capacity(&mut self, arc: usize, cap: i64) {
        let f = self.flow(arc);
        assert!(cap >= f, "capacity {cap} below routed flow {f}");
        self.arcs[arc].cap = cap - f;
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: i64) -> i64 {
        if u == t {
            return limit;
        }
        while self.cursor[u] < self.out[u].len() {
            let a = self.out[u][self.cursor[u]];
            let Arc { to, cap } = self.arcs[a];
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        0
    }

    /// Augments to a maximum flow and returns the amount added by this call.
    pub fn augment(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(s, t, i64::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.out[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }
}
