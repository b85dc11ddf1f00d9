//! Edge colorings and graph decompositions.
//!
//! - [`vizing_edge_coloring`]: Misra–Gries fan/alternating-path recoloring,
//!   at most `Δ + 1` colors.
//! - [`two_factorization`]: Euler-circuit orientation followed by a
//!   1-factorization of the out/in double cover.
//! - [`equalize_matching_pairs`]: pairs two families of matchings into
//!   equal-size pairs by splitting.
//! - [`bipartite_one_factorization`]: peels perfect matchings off a regular
//!   balanced bipartite view.

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Matching, OneFactorization, Vertex};
use crate::matching::{perfect_matching_or_witness, BipartiteView, PerfectMatchingOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("2-factorization needs a positive even degree, got {0}")]
    OddOrZeroDegree(usize),
    #[error("matching families carry {a} and {b} edges")]
    UnequalTotals { a: usize, b: usize },
    #[error("view is not a regular balanced bipartite graph")]
    NotRegularBipartite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    /// Color of each edge id.
    pub colors: Vec<usize>,
    /// Number of colors used (one more than the largest color index).
    pub k: usize,
}

impl EdgeColoring {
    pub fn is_proper(&self, g: &Graph) -> bool {
        if self.colors.len() != g.m() {
            return false;
        }
        (0..g.n()).all(|v| {
            let mut seen = vec![false; self.k];
            g.neighbors(v).iter().all(|&(_, e)| {
                let c = self.colors[e];
                c < self.k && !std::mem::replace(&mut seen[c], true)
            })
        })
    }

    /// Color classes in color order; every class is a matching.
    pub fn classes(&self) -> Vec<Matching> {
        let mut classes = vec![Vec::new(); self.k];
        for (e, &c) in self.colors.iter().enumerate() {
            classes[c].push(e);
        }
        classes.into_iter().map(Matching::from_sorted_unchecked).collect()
    }
}

struct Palette {
    color: Vec<Option<usize>>,
    // at[v][c] = edge of color c at v
    at: Vec<Vec<Option<EdgeId>>>,
}

impl Palette {
    fn is_free(&self, v: Vertex, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn first_free(&self, v: Vertex) -> usize {
        self.at[v].iter().position(Option::is_none).expect("Δ+1 colors leave one free")
    }

    fn set(&mut self, g: &Graph, e: EdgeId, c: usize) {
        let (u, v) = g.edge(e);
        debug_assert!(self.is_free(u, c) && self.is_free(v, c));
        self.color[e] = Some(c);
        self.at[u][c] = Some(e);
        self.at[v][c] = Some(e);
    }

    fn clear(&mut self, g: &Graph, e: EdgeId) -> usize {
        let c = self.color[e].take().expect("edge is colored");
        let (u, v) = g.edge(e);
        self.at[u][c] = None;
        self.at[v][c] = None;
        c
    }
}

/// Proper edge coloring with at most `Δ + 1` colors (Misra–Gries).
/// Edges are processed in id order; every free-color choice takes the
/// lowest index, so the output is a deterministic function of the input.
pub fn vizing_edge_coloring(g: &Graph) -> EdgeColoring {
    let palette_size = g.max_degree() + 1;
    let mut p = Palette { color: vec![None; g.m()], at: vec![vec![None; palette_size]; g.n()] };

    for e in 0..g.m() {
        let (u, v0) = g.edge(e);
        // maximal fan at u starting with v0
        let mut fan = vec![v0];
        let mut fan_edges = vec![e];
        let mut in_fan = vec![false; g.n()];
        in_fan[v0] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = (0..palette_size).filter(|&c| p.is_free(last, c)).find_map(|c| {
                let f = p.at[u][c]?;
                let w = g.other_end(f, u);
                (!in_fan[w]).then_some((w, f))
            });
            match next {
                Some((w, f)) => {
                    in_fan[w] = true;
                    fan.push(w);
                    fan_edges.push(f);
                }
                None => break,
            }
        }

        let c = p.first_free(u);
        let d = p.first_free(*fan.last().unwrap());

        // invert the cd-path starting at u (its first edge has color d)
        if c != d {
            let mut path = Vec::new();
            let (mut x, mut want) = (u, d);
            while let Some(f) = p.at[x][want] {
                path.push(f);
                x = g.other_end(f, x);
                want = if want == d { c } else { d };
            }
            let old: Vec<usize> = path.iter().map(|&f| p.clear(g, f)).collect();
            for (&f, &oc) in path.iter().zip(&old) {
                p.set(g, f, if oc == d { c } else { d });
            }
        }

        // longest usable prefix ending at a vertex where d is free
        let is_fan_prefix = |p: &Palette, upto: usize| {
            (1..=upto).all(|j| match p.color[fan_edges[j]] {
                Some(cj) => p.is_free(fan[j - 1], cj),
                None => false,
            })
        };
        let w = (0..fan.len())
            .find(|&i| p.is_free(fan[i], d) && is_fan_prefix(&p, i))
            .expect("Misra–Gries guarantees a rotatable prefix");

        // rotate the prefix and close with d
        for j in 0..w {
            let cj = p.clear(g, fan_edges[j + 1]);
            p.set(g, fan_edges[j], cj);
        }
        p.set(g, fan_edges[w], d);
    }

    let colors: Vec<usize> = p.color.into_iter().map(|c| c.expect("all edges colored")).collect();
    let k = colors.iter().max().map_or(0, |&c| c + 1);
    EdgeColoring { colors, k }
}

/// Tries to empty the top color class while more than `Δ` colors are used.
/// Each edge of the top color moves to a color free at both ends, after at
/// most one two-color path swap. Returns the input unchanged when an edge
/// cannot be moved.
pub fn reduce_colors(g: &Graph, coloring: &EdgeColoring) -> EdgeColoring {
    let mut best = coloring.clone();
    while best.k > g.max_degree() && best.k > 0 {
        match drop_top_color(g, &best) {
            Some(c) => best = c,
            None => break,
        }
    }
    best
}

fn drop_top_color(g: &Graph, coloring: &EdgeColoring) -> Option<EdgeColoring> {
    let k = coloring.k - 1;
    let mut color = coloring.colors.clone();
    let mut at = vec![vec![None; k]; g.n()];
    for (e, &c) in color.iter().enumerate() {
        if c < k {
            let (u, v) = g.edge(e);
            at[u][c] = Some(e);
            at[v][c] = Some(e);
        }
    }
    let top: Vec<EdgeId> = (0..g.m()).filter(|&e| color[e] == k).collect();
    for e in top {
        let (u, v) = g.edge(e);
        let free =
            |at: &Vec<Vec<Option<EdgeId>>>, x: Vertex| (0..k).filter(|&c| at[x][c].is_none()).collect::<Vec<_>>();
        let (fu, fv) = (free(&at, u), free(&at, v));
        let mut placed = fu.iter().copied().find(|c| fv.contains(c));
        if placed.is_none() {
            'outer: for &a in &fu {
                for &b in &fv {
                    // path from v alternating a, b; v misses b so it starts with a
                    let mut path = Vec::new();
                    let (mut x, mut want) = (v, a);
                    while let Some(f) = at[x][want] {
                        path.push(f);
                        x = g.other_end(f, x);
                        want = if want == a { b } else { a };
                    }
                    if x == u {
                        continue;
                    }
                    for &f in &path {
                        let (p, q) = g.edge(f);
                        at[p][color[f]] = None;
                        at[q][color[f]] = None;
                    }
                    for &f in &path {
                        color[f] = if color[f] == a { b } else { a };
                        let (p, q) = g.edge(f);
                        at[p][color[f]] = Some(f);
                        at[q][color[f]] = Some(f);
                    }
                    placed = Some(a);
                    break 'outer;
                }
            }
        }
        let c = placed?;
        color[e] = c;
        at[u][c] = Some(e);
        at[v][c] = Some(e);
    }
    let k = color.iter().max().map_or(0, |&c| c + 1);
    Some(EdgeColoring { colors: color, k })
}

/// Rebalances a proper coloring onto exactly `k ≥ coloring.k` colors so that
/// class sizes differ by at most one. While the largest and smallest classes
/// differ by two or more, their union contains a path with one more edge of
/// the larger color, and swapping the two colors along it moves one edge.
pub fn equitable_classes(g: &Graph, coloring: &EdgeColoring, k: usize) -> Vec<Matching> {
    assert!(k >= coloring.k, "palette of {k} cannot hold {} colors", coloring.k);
    if k == 0 {
        return Vec::new();
    }
    let mut color = coloring.colors.clone();
    let mut at = vec![vec![None; k]; g.n()];
    let mut size = vec![0usize; k];
    for (e, &c) in color.iter().enumerate() {
        let (u, v) = g.edge(e);
        at[u][c] = Some(e);
        at[v][c] = Some(e);
        size[c] += 1;
    }
    loop {
        let big = (0..k).max_by_key(|&c| (size[c], std::cmp::Reverse(c))).unwrap();
        let small = (0..k).min_by_key(|&c| (size[c], c)).unwrap();
        if size[big] <= size[small] + 1 {
            break;
        }
        let path = (0..g.n())
            .filter(|&v| at[v][big].is_some() != at[v][small].is_some())
            .find_map(|start| {
                let mut path = Vec::new();
                let (mut x, mut want) = (start, if at[start][big].is_some() { big } else { small });
                while let Some(e) = at[x][want] {
                    path.push(e);
                    x = g.other_end(e, x);
                    want = if want == big { small } else { big };
                }
                let bigs = path.iter().filter(|&&e| color[e] == big).count();
                (2 * bigs > path.len()).then_some(path)
            })
            .expect("imbalanced color pair has an alternating path to swap");
        for &e in &path {
            let (u, v) = g.edge(e);
            at[u][color[e]] = None;
            at[v][color[e]] = None;
        }
        for &e in &path {
            let c = if color[e] == big { small } else { big };
            color[e] = c;
            let (u, v) = g.edge(e);
            at[u][c] = Some(e);
            at[v][c] = Some(e);
        }
        size[big] -= 1;
        size[small] += 1;
    }
    EdgeColoring { colors: color, k }.classes()
}

/// Edge sets of spanning 2-regular subgraphs partitioning the host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFactorization {
    pub factors: Vec<Vec<EdgeId>>,
}

/// Orients every edge along an Euler circuit of its component, so each
/// vertex of a 2k-regular graph gets in- and out-degree k. Returns `(tail, head)` per edge.
pub fn euler_orientation(g: &Graph) -> Vec<(Vertex, Vertex)> {
    let mut orient = vec![(0, 0); g.m()];
    let mut used = vec![false; g.m()];
    let mut ptr = vec![0usize; g.n()];
    for start in 0..g.n() {
        if ptr[start] == g.degree(start) {
            continue;
        }
        // iterative Hierholzer; orientation is the push direction
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            let nbrs = g.neighbors(v);
            while ptr[v] < nbrs.len() && used[nbrs[ptr[v]].1] {
                ptr[v] += 1;
            }
            if ptr[v] == nbrs.len() {
                stack.pop();
                continue;
            }
            let (w, e) = nbrs[ptr[v]];
            used[e] = true;
            orient[e] = (v, w);
            stack.push(w);
        }
    }
    orient
}

/// Splits a 2k-regular graph into k 2-factors.
pub fn two_factorization(g: &Graph) -> Result<TwoFactorization, ColoringError> {
    let d = g.regular_degree().ok_or(ColoringError::NotRegular)?;
    if d == 0 || d % 2 == 1 {
        return Err(ColoringError::OddOrZeroDegree(d));
    }
    let n = g.n();
    let orient = euler_orientation(g);
    // out-copy of v is v, in-copy is n + v; edge ids are preserved
    let pairs: Vec<(Vertex, Vertex)> = orient.iter().map(|&(t, h)| (t, n + h)).collect();
    let cover = Graph::new(2 * n, &pairs).expect("double cover of a simple graph is simple");
    let view = BipartiteView::new(&cover, (0..n).collect(), (n..2 * n).collect(), (0..g.m()).collect())
        .expect("double cover is bipartite");
    let f = bipartite_one_factorization(&view)?;
    Ok(TwoFactorization { factors: f.classes.into_iter().map(Matching::into_edges).collect() })
}

/// Pairs the matchings of `a` with those of `b` so that paired matchings
/// have equal size: the currently largest matching of each family is
/// paired, and the larger of the two is cut to the smaller's size (taking
/// its lowest edge ids) with the rest returned to its family.
pub fn equalize_matching_pairs(a: Vec<Matching>, b: Vec<Matching>) -> Result<Vec<(Matching, Matching)>, ColoringError> {
    let total = |fam: &[Matching]| fam.iter().map(Matching::len).sum::<usize>();
    let (ta, tb) = (total(&a), total(&b));
    if ta != tb {
        return Err(ColoringError::UnequalTotals { a: ta, b: tb });
    }
    let mut pool_a: Vec<Matching> = a.into_iter().filter(|m| !m.is_empty()).collect();
    let mut pool_b: Vec<Matching> = b.into_iter().filter(|m| !m.is_empty()).collect();
    let largest = |pool: &[Matching]| {
        let max = pool.iter().map(Matching::len).max().unwrap();
        pool.iter().position(|m| m.len() == max).unwrap()
    };
    let mut pairs = Vec::new();
    while !pool_a.is_empty() {
        let (ia, ib) = (largest(&pool_a), largest(&pool_b));
        let ma = pool_a.remove(ia);
        let mb = pool_b.remove(ib);
        match ma.len().cmp(&mb.len()) {
            std::cmp::Ordering::Greater => {
                let (front, rest) = ma.split_front(mb.len());
                pool_a.insert(ia, rest);
                pairs.push((front, mb));
            }
            std::cmp::Ordering::Less => {
                let (front, rest) = mb.split_front(ma.len());
                pool_b.insert(ib, rest);
                pairs.push((ma, front));
            }
            std::cmp::Ordering::Equal => pairs.push((ma, mb)),
        }
    }
    Ok(pairs)
}

/// 1-factorization of an r-regular balanced bipartite view: each perfect
/// matching removed leaves an (r−1)-regular view, which again has one.
pub fn bipartite_one_factorization(view: &BipartiteView) -> Result<OneFactorization, ColoringError> {
    let r = view.regular_degree().ok_or(ColoringError::NotRegularBipartite)?;
    let host = view.host();
    let mut remaining = view.edges().to_vec();
    let mut classes = Vec::with_capacity(r);
    for _ in 0..r {
        let current = view.restrict(remaining.clone()).expect("subset of a valid view");
        let pm = match perfect_matching_or_witness(&current) {
            PerfectMatchingOutcome::Perfect(m) => m,
            PerfectMatchingOutcome::Deficient(w) => {
                unreachable!("regular bipartite graph violates Hall: {w:?}")
            }
        };
        let mut taken = vec![false; host.m()];
        for &e in pm.edges() {
            taken[e] = true;
        }
        remaining.retain(|&e| !taken[e]);
        classes.push(pm);
    }
    Ok(OneFactorization::new(classes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen() -> Graph {
        let mut pairs = Vec::new();
        for i in 0..5 {
            pairs.push((i, (i + 1) % 5));
            pairs.push((i, i + 5));
            pairs.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, &pairs).unwrap()
    }

    /// Exhaustive search for a proper edge coloring with `k` colors.
    fn colorable(g: &Graph, k: usize) -> bool {
        fn go(g: &Graph, e: usize, k: usize, col: &mut Vec<usize>) -> bool {
            if e == g.m() {
                return true;
            }
            let (u, v) = g.edge(e);
            for c in 0..k {
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

    #[test]
    fn path_uses_two_colors() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let c = vizing_edge_coloring(&g);
        assert!(c.is_proper(&g));
        assert_eq!(c.k, 2);
    }

    #[test]
    fn reduce_colors_on_even_cycle() {
        let g = Graph::cycle(6);
        // 0,1,0,1,0,2 is proper with three colors
        let c = EdgeColoring { colors: vec![0, 1, 0, 1, 0, 2], k: 3 };
        assert!(c.is_proper(&g));
        let r = reduce_colors(&g, &c);
        assert!(r.is_proper(&g));
        assert_eq!(r.k, 2);
    }

    #[test]
    fn reduce_colors_keeps_class_two_graphs() {
        for g in [Graph::cycle(7), petersen()] {
            let c = vizing_edge_coloring(&g);
            let r = reduce_colors(&g, &c);
            assert!(r.is_proper(&g));
            assert_eq!(r.k, g.max_degree() + 1);
        }
    }

    #[test]
    fn odd_cycle_uses_three_colors() {
        let g = Graph::cycle(5);
        let c = vizing_edge_coloring(&g);
        assert!(c.is_proper(&g));
        assert_eq!(c.k, 3);
    }

    #[test]
    fn petersen_needs_four() {
        let g = petersen();
        let c = vizing_edge_coloring(&g);
        assert!(c.is_proper(&g));
        assert!(c.k <= 4);
        assert!(!colorable(&g, 3));
        assert!(colorable(&g, 4));
    }

    #[test]
    fn classes_are_matchings() {
        let g = Graph::complete(7);
        let c = vizing_edge_coloring(&g);
        assert!(c.is_proper(&g));
        for class in c.classes() {
            Matching::new(&g, class.into_edges()).unwrap();
        }
    }

    #[test]
    fn equitable_rebalancing() {
        let g = Graph::complete(6);
        let c = vizing_edge_coloring(&g);
        for k in c.k..c.k + 4 {
            let classes = equitable_classes(&g, &c, k);
            assert_eq!(classes.len(), k);
            let sizes: Vec<usize> = classes.iter().map(Matching::len).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, "{sizes:?}");
            assert_eq!(sizes.iter().sum::<usize>(), 15);
            for class in classes {
                Matching::new(&g, class.into_edges()).unwrap();
            }
        }
        // a star forces one edge per color
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let sizes: Vec<usize> =
            equitable_classes(&star, &vizing_edge_coloring(&star), 3).iter().map(Matching::len).collect();
        assert_eq!(sizes, vec![1, 1, 1]);
    }

    #[test]
    fn two_factorization_of_cycle_is_itself() {
        let g = Graph::cycle(6);
        let tf = two_factorization(&g).unwrap();
        assert_eq!(tf.factors.len(), 1);
        let mut f = tf.factors[0].clone();
        f.sort_unstable();
        assert_eq!(f, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn two_factorization_of_k5() {
        let g = Graph::complete(5);
        let tf = two_factorization(&g).unwrap();
        assert_eq!(tf.factors.len(), 2);
        let mut all = Vec::new();
        for f in &tf.factors {
            let mut deg = vec![0; 5];
            for &e in f {
                let (u, v) = g.edge(e);
                deg[u] += 1;
                deg[v] += 1;
            }
            assert!(deg.iter().all(|&x| x == 2));
            all.extend_from_slice(f);
        }
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn two_factorization_rejects_odd_degree() {
        assert_eq!(two_factorization(&Graph::complete(4)), Err(ColoringError::OddOrZeroDegree(3)));
        assert_eq!(two_factorization(&Graph::empty(4)), Err(ColoringError::OddOrZeroDegree(0)));
    }

    fn sized(sizes: &[usize], offset: usize) -> Vec<Matching> {
        let mut next = offset;
        sizes
            .iter()
            .map(|&s| {
                let m = Matching::from_sorted_unchecked((next..next + s).collect());
                next += s;
                m
            })
            .collect()
    }

    #[test]
    fn equalize_example() {
        let pairs = equalize_matching_pairs(sized(&[3, 2], 0), sized(&[4, 1], 100)).unwrap();
        let sizes: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (a.len(), b.len())).collect();
        assert_eq!(sizes, vec![(3, 3), (1, 1), (1, 1)]);
        // the 4-matching was carved from the front
        assert_eq!(pairs[0].1.edges(), &[100, 101, 102]);
    }

    #[test]
    fn equalize_identity_and_empty() {
        let pairs = equalize_matching_pairs(sized(&[2, 1], 0), sized(&[2, 1], 10)).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].0.edges(), &[0, 1]);
        assert_eq!(pairs[0].1.edges(), &[10, 11]);
        assert!(equalize_matching_pairs(vec![], vec![]).unwrap().is_empty());
        assert_eq!(
            equalize_matching_pairs(sized(&[2], 0), sized(&[1], 5)),
            Err(ColoringError::UnequalTotals { a: 2, b: 1 })
        );
    }

    fn halves(n: usize) -> Vec<bool> {
        (0..n).map(|v| v < n / 2).collect()
    }

    #[test]
    fn bipartite_factorizations() {
        let mut pairs = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                pairs.push((i, 3 + j));
            }
        }
        let k33 = Graph::new(6, &pairs).unwrap();
        let f = bipartite_one_factorization(&BipartiteView::crossing(&k33, &halves(6))).unwrap();
        assert_eq!(f.len(), 3);

        let c6 = Graph::cycle(6);
        let evens: Vec<bool> = (0..6).map(|v| v % 2 == 0).collect();
        let f = bipartite_one_factorization(&BipartiteView::crossing(&c6, &evens)).unwrap();
        assert_eq!(f.len(), 2);

        let m = Graph::new(4, &[(0, 2), (1, 3)]).unwrap();
        let f = bipartite_one_factorization(&BipartiteView::crossing(&m, &halves(4))).unwrap();
        assert_eq!(f.classes, vec![Matching::from_sorted_unchecked(vec![0, 1])]);
    }

    #[test]
    fn bipartite_factorization_rejects_irregular() {
        let g = Graph::new(4, &[(0, 2), (1, 3), (0, 3)]).unwrap();
        let view = BipartiteView::crossing(&g, &halves(4));
        assert_eq!(bipartite_one_factorization(&view), Err(ColoringError::NotRegularBipartite));
    }
}
