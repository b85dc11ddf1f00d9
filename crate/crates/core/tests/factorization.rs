mod common;

use common::{complete_bipartite, edge_colorable, ordered_one_factorizations};
use onefactor::generators::{generate, petersen, GenSpec, Model};
use onefactor::pipeline::{
    counting_bounds, factorize, read_factorization, verify_factorization, verify_triples, write_factorization,
    PipelineConfig, Verdict, Violation,
};
use onefactor::{Graph, Matching, OneFactorization};

#[test]
fn ordered_factorization_counts_of_small_complete_bipartite_graphs() {
    assert_eq!(ordered_one_factorizations(&complete_bipartite(1)), 1);
    assert_eq!(ordered_one_factorizations(&complete_bipartite(2)), 2);
    assert_eq!(ordered_one_factorizations(&complete_bipartite(3)), 12);
    assert_eq!(ordered_one_factorizations(&complete_bipartite(4)), 576);
}

#[test]
fn schrijver_bound_is_below_exhaustive_counts() {
    for k in 1..=4 {
        let g = complete_bipartite(k);
        let b = counting_bounds(2 * k, k, 0.1, Some(k), None).unwrap().schrijver.unwrap();
        assert!(b <= (ordered_one_factorizations(&g) as f64).ln() + 1e-12);
    }
    for seed in 0..40 {
        let h = 2 + seed as usize % 5;
        let d = 1 + seed as usize % 3.min(h);
        let g = generate(GenSpec { model: Model::RandomBipartiteRegular, n: 2 * h, d, seed }).unwrap();
        let b = counting_bounds(2 * h, d, 0.1, Some(h), None).unwrap().schrijver.unwrap();
        let count = ordered_one_factorizations(&g);
        assert!(count >= 1);
        assert!(b <= (count as f64).ln() + 1e-12, "h={h} d={d}: {b} vs ln {count}");
    }
}

#[test]
fn petersen_is_class_two() {
    let g = petersen();
    assert!(!edge_colorable(&g, 3));
    assert!(edge_colorable(&g, 4));
    for seed in 0..5 {
        let out = factorize(&g, &PipelineConfig { seed, ..PipelineConfig::default() }).unwrap();
        assert!(!out.is_success());
    }
}

#[test]
fn successful_runs_are_verified_and_account_for_every_degree() {
    let mut successes = 0;
    for seed in 0..30 {
        let (n, d) = [(20, 6), (30, 8), (24, 11), (40, 12)][seed as usize % 4];
        let g = generate(GenSpec { model: Model::RandomRegular, n, d, seed }).unwrap();
        let out = factorize(&g, &PipelineConfig { seed, ..PipelineConfig::default() }).unwrap();
        let Ok(f) = &out.result else { continue };
        successes += 1;
        assert_eq!(verify_factorization(&g, f), Verdict::Accept);
        let s = &out.stats;
        if s.shortcut.is_none() {
            assert_eq!(s.r * s.t + s.r_primes.iter().sum::<usize>(), d);
            assert!(s.r_primes.iter().all(|r| r % 2 == 0));
            assert_eq!(s.r_primes.len(), s.t);
        }
    }
    assert!(successes >= 25, "only {successes} of 30 runs succeeded");
}

#[test]
fn complete_graphs_factorize() {
    for n in (2..=24).step_by(2) {
        let g = Graph::complete(n);
        let out = factorize(&g, &PipelineConfig::default()).unwrap();
        let f = out.result.expect("complete graphs of even order factorize");
        assert_eq!(verify_factorization(&g, &f), Verdict::Accept);
    }
}

#[test]
fn verifier_rejects_corruptions() {
    let g = Graph::complete(6);
    let f = factorize(&g, &PipelineConfig::default()).unwrap().result.unwrap();

    let mut fewer = f.classes.clone();
    fewer.pop();
    assert!(matches!(
        verify_factorization(&g, &OneFactorization::new(fewer)),
        Verdict::Reject(Violation::ClassCount { expected: 5, found: 4 })
    ));

    // move one edge of class 0 into class 1
    let mut moved = f.classes.clone();
    let e = moved[0].edges()[0];
    let rest: Vec<usize> = moved[0].edges()[1..].to_vec();
    moved[0] = Matching::new(&g, rest).unwrap();
    let mut with: Vec<usize> = moved[1].edges().to_vec();
    with.push(e);
    if let Ok(m) = Matching::new(&g, with) {
        moved[1] = m;
    }
    assert!(!verify_factorization(&g, &OneFactorization::new(moved)).accepted());
}

#[test]
fn factorization_files_round_trip() {
    let g = generate(GenSpec { model: Model::RandomRegular, n: 16, d: 5, seed: 3 }).unwrap();
    let out = factorize(&g, &PipelineConfig { seed: 3, ..PipelineConfig::default() }).unwrap();
    if let Ok(f) = out.result {
        let text = write_factorization(&g, &f, &[("seed".into(), "3".into())]);
        let triples = read_factorization(&text).unwrap();
        assert_eq!(triples.len(), g.m());
        assert_eq!(verify_triples(&g, &triples), Verdict::Accept);
    }
}
