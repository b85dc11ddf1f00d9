mod common;

use common::{gale_ryser_holds, random_bipartite, side_masks};
use onefactor::flow::FlowNetwork;
use onefactor::matching::{
    max_bipartite_matching, min_degree_perfect_matching, perfect_matching_or_witness, r_factor, BipartiteView,
    FactorError, PerfectMatchingOutcome,
};
use onefactor::seed::rng;
use onefactor::Graph;
use rand::Rng;

fn brute_max_matching(adj: &[u32], i: usize, used: u32) -> usize {
    if i == adj.len() {
        return 0;
    }
    let mut best = brute_max_matching(adj, i + 1, used);
    let mut free = adj[i] & !used;
    while free != 0 {
        let bit = free & free.wrapping_neg();
        best = best.max(1 + brute_max_matching(adj, i + 1, used | bit));
        free &= free - 1;
    }
    best
}

#[test]
fn matching_size_agrees_with_brute_force() {
    let mut r = rng(11);
    for _ in 0..300 {
        let (a, b) = (r.gen_range(1..=7), r.gen_range(1..=7));
        let (g, in_a) = random_bipartite(a, b, r.gen_range(0.1..0.9), &mut r);
        let view = BipartiteView::crossing(&g, &in_a);
        let m = max_bipartite_matching(&view);
        assert_eq!(m.len(), brute_max_matching(&side_masks(&g, a), 0, 0));
    }
}

#[test]
fn hall_witness_is_a_real_violation() {
    let mut r = rng(12);
    let mut deficient = 0;
    for _ in 0..300 {
        let k = r.gen_range(1..=7);
        let (g, in_a) = random_bipartite(k, k, r.gen_range(0.1..0.6), &mut r);
        let view = BipartiteView::crossing(&g, &in_a);
        match perfect_matching_or_witness(&view) {
            PerfectMatchingOutcome::Perfect(m) => assert!(m.is_perfect(&g)),
            PerfectMatchingOutcome::Deficient(w) => {
                deficient += 1;
                let mut nbrs: Vec<usize> = w.set.iter().flat_map(|&x| g.neighbors(x).iter().map(|&(y, _)| y)).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                assert_eq!(nbrs, w.neighborhood);
                assert!(nbrs.len() < w.set.len());
            }
        }
    }
    assert!(deficient > 0);
}

#[test]
fn gale_ryser_agrees_with_flow_on_500_views() {
    let mut r = rng(13);
    let mut feasible = 0;
    for _ in 0..500 {
        let k = r.gen_range(1..=7);
        let (g, in_a) = random_bipartite(k, k, r.gen_range(0.3..1.0), &mut r);
        let view = BipartiteView::crossing(&g, &in_a);
        let deg = r.gen_range(0..=k);
        let expected = gale_ryser_holds(&side_masks(&g, k), k, deg);
        match r_factor(&view, deg) {
            Ok(f) => {
                assert!(expected);
                assert!(f.is_valid_for(&view));
                feasible += 1;
            }
            Err(FactorError::Infeasible { witness, .. }) => {
                assert!(!expected);
                assert!((witness.edges_between as i64) < witness.required);
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(feasible > 0 && feasible < 500);
}

#[test]
fn dense_graphs_have_perfect_matchings() {
    let mut r = rng(14);
    for _ in 0..100 {
        let n = 2 * r.gen_range(1..=10);
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if r.gen_bool(0.8) {
                    pairs.push((u, v));
                }
            }
        }
        let g = Graph::new(n, &pairs).unwrap();
        match min_degree_perfect_matching(&g) {
            Ok(m) => assert!(m.is_perfect(&g)),
            Err(_) => assert!(2 * g.min_degree() < n),
        }
    }
}

#[test]
fn max_flow_equals_min_cut() {
    let mut r = rng(15);
    for _ in 0..200 {
        let n = r.gen_range(2..=8);
        let mut net = FlowNetwork::new(n);
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && r.gen_bool(0.4) {
                    let cap = r.gen_range(0..10);
                    net.add_arc(u, v, cap);
                    arcs.push((u, v, cap));
                }
            }
        }
        let flow = net.augment(0, n - 1);
        let min_cut = (0u32..1 << n)
            .filter(|s| s & 1 == 1 && s >> (n - 1) & 1 == 0)
            .map(|s| arcs.iter().filter(|&&(u, v, _)| s >> u & 1 == 1 && s >> v & 1 == 0).map(|a| a.2).sum::<i64>())
            .min()
            .unwrap();
        assert_eq!(flow, min_cut);
    }
}
