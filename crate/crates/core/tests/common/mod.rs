//! Brute-force oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use std::collections::HashMap;

use onefactor::Graph;
use rand::Rng;

/// Erdős–Rényi graph `G(n, p)`.
pub fn gnp(n: usize, p: f64, r: &mut impl Rng) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::new(n, &pairs).unwrap()
}

/// Random bipartite graph with sides `0..a` and `a..a+b`, edge probability `p`.
pub fn random_bipartite(a: usize, b: usize, p: f64, r: &mut impl Rng) -> (Graph, Vec<bool>) {
    let mut pairs = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            if r.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    let in_a = (0..a + b).map(|v| v < a).collect();
    (Graph::new(a + b, &pairs).unwrap(), in_a)
}

/// Adjacency bitmasks of the A vertices `0..a` over B.
pub fn side_masks(g: &Graph, a: usize) -> Vec<u32> {
    let mut m = vec![0u32; a];
    for &(u, v) in g.edges() {
        let (x, y) = if u < a { (u, v) } else { (v, u) };
        m[x] |= 1 << (y - a);
    }
    m
}

/// e(X, Y) ≥ r(|X| + |Y| − k) for every X ⊆ A, Y ⊆ B, with |A| = |B| = k.
pub fn gale_ryser_holds(adj: &[u32], k: usize, r: usize) -> bool {
    for x in 0u32..1 << k {
        for y in 0u32..1 << k {
            let e: u32 = (0..k).filter(|&i| x >> i & 1 == 1).map(|i| (adj[i] & y).count_ones()).sum();
            let need = r as i64 * (x.count_ones() as i64 + y.count_ones() as i64 - k as i64);
            if (e as i64) < need {
                return false;
            }
        }
    }
    true
}

/// Whether a proper edge coloring assigns `colors`.
pub fn is_proper(g: &Graph, colors: &[usize]) -> bool {
    (0..g.n()).all(|v| {
        let mut seen: Vec<usize> = g.neighbors(v).iter().map(|&(_, e)| colors[e]).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    })
}

/// Every perfect matching of a graph with at most 64 edges, as edge masks.
pub fn perfect_matchings(g: &Graph) -> Vec<u64> {
    assert!(g.m() <= 64);
    fn go(g: &Graph, covered: &mut [bool], mask: u64, out: &mut Vec<u64>) {
        let Some(v) = covered.iter().position(|&c| !c) else {
            out.push(mask);
            return;
        };
        covered[v] = true;
        for &(w, e) in g.neighbors(v) {
            if !covered[w] {
                covered[w] = true;
                go(g, covered, mask | 1 << e, out);
                covered[w] = false;
            }
        }
        covered[v] = false;
    }
    let mut out = Vec::new();
    go(g, &mut vec![false; g.n()], 0, &mut out);
    out
}

/// Number of ordered sequences of disjoint perfect matchings covering every edge.
pub fn ordered_one_factorizations(g: &Graph) -> u64 {
    let pms = perfect_matchings(g);
    let full = if g.m() == 64 { u64::MAX } else { (1u64 << g.m()) - 1 };
    fn count(used: u64, full: u64, pms: &[u64], memo: &mut HashMap<u64, u64>) -> u64 {
        if used == full {
            return 1;
        }
        if let Some(&c) = memo.get(&used) {
            return c;
        }
        let c = pms.iter().filter(|&&m| m & used == 0).map(|&m| count(used | m, full, pms, memo)).sum();
        memo.insert(used, c);
        c
    }
    count(0, full, &pms, &mut HashMap::new())
}

/// Complete bipartite graph with sides `0..k` and `k..2k`.
pub fn complete_bipartite(k: usize) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|u| (k..2 * k).map(move |v| (u, v))).collect();
    Graph::new(2 * k, &pairs).unwrap()
}

/// Whether some proper edge coloring uses `k` colors.
pub fn edge_colorable(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, e: usize, k: usize, col: &mut [usize]) -> bool {
        if e == g.m() {
            return true;
        }
        let (u, v) = g.edge(e);
        // symmetry: edge e may open at most one new color
        let used = col[..e].iter().copied().max().map_or(0, |c| c + 1);
        for c in 0..k.min(used + 1) {
            let clash = g.neighbors(u).iter().chain(g.neighbors(v)).any(|&(_, f)| f < e && col[f] == c);
            if !clash {
                col[e] = c;
                if go(g, e + 1, k, col) {
                    return true;
                }
            }
        }
        false
    }
    go(g, 0, k, &mut vec![usize::MAX; g.m()])
}

/// `max(|λ₂|, |λ_n|)` of the adjacency matrix, from a full dense eigendecomposition.
pub fn dense_lambda(g: &Graph) -> f64 {
    let n = g.n();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev[1].abs().max(ev[n - 1].abs())
}
