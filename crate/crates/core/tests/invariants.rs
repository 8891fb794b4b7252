use std::collections::HashSet;

use derangement::cli::gen_instance;
use derangement::engine::{
    candidates, extend_iteration, search, ColumnCounter, EngineConfig, Extension, PathFlavor,
    PathMatrix, Provenance, SearchPath,
};
use derangement::{CostMatrix, DerangementMode, DerivedMatrix, Permutation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edges created by the arcs of a walk, recomputed from scratch: the arc
/// `(x, y)` replaces `{x, D(x)}` by `{x, D(y)}`.
fn created_edges(d: &Permutation, walk: &[usize]) -> Vec<(usize, usize)> {
    walk.windows(2)
        .map(|w| {
            let (a, b) = (w[0], d.apply(w[1]));
            (a.min(b), a.max(b))
        })
        .collect()
}

fn distinct(edges: &[(usize, usize)]) -> bool {
    edges.iter().collect::<HashSet<_>>().len() == edges.len()
}

fn random_derangement(rng: &mut ChaCha8Rng, n: usize, mode: DerangementMode) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    loop {
        images.shuffle(rng);
        let p = Permutation::from_mapping(&images).unwrap();
        if p.is_derangement(mode) {
            return p;
        }
    }
}

fn instance(seed: u64, n: usize) -> (CostMatrix, DerivedMatrix) {
    let m = gen_instance(n, seed, -50, 50).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let d = random_derangement(&mut rng, n, DerangementMode::Assignment);
    let dm = DerivedMatrix::new(&m, &d).unwrap();
    (m, dm)
}

#[test]
fn random_walks_keep_edges_distinct() {
    let mut attempts = 0u64;
    let mut seed = 0u64;
    while attempts < 100_000 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=12);
        let (_, dm) = instance(seed, n);
        let d = dm.base().clone();
        for source in 1..=n {
            let mut q = SearchPath::start(source);
            loop {
                let a = rng.gen_range(1..=n);
                if a == q.end() {
                    continue;
                }
                attempts += 1;
                let Ok(step) = q.classify(&dm, a, PathFlavor::Simple) else {
                    assert_eq!(d.apply(a), q.end());
                    continue;
                };
                let mut walk = q.vertices().to_vec();
                walk.push(a);
                match step {
                    Some(Extension::Open) => {
                        q = SearchPath::from_vertices(&dm, &walk).unwrap();
                        let edges = created_edges(&d, q.vertices());
                        assert!(distinct(&edges), "walk {walk:?}");
                        assert_eq!(q.new_edges().distinct_len(), q.arcs());
                    }
                    Some(Extension::Close) => {
                        assert!(distinct(&created_edges(&d, &walk)), "closing walk {walk:?}");
                        break;
                    }
                    Some(Extension::Revisit(_)) => unreachable!("simple flavor"),
                    None => {
                        if q.arcs() >= n || rng.gen_bool(0.2) {
                            break;
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn retained_labels_and_returned_cycles_keep_edges_distinct() {
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=10);
        let (_, dm) = instance(seed + 10_000, n);
        let d = dm.base().clone();
        let config = EngineConfig {
            labels: rng.gen_range(1..=4),
            prune_nonnegative: rng.gen_bool(0.5),
            flavor: if rng.gen_bool(0.5) {
                PathFlavor::NonSimple
            } else {
                PathFlavor::Simple
            },
            ..EngineConfig::default()
        };
        let mut pm = PathMatrix::initial(n, &(1..=n).collect::<Vec<_>>());
        let mut counter = ColumnCounter::new();
        for _ in 0..n {
            pm = extend_iteration(&pm, &dm, &mut counter, &config);
            for label in pm.labels() {
                assert!(distinct(&created_edges(&d, label.vertices())));
                assert_eq!(created_edges(&d, label.vertices()).len(), label.arcs());
            }
            for c in pm.closed() {
                assert!(distinct(&created_edges(&d, &c.route)), "route {:?}", c.route);
                assert_eq!(dm.cycle_weight(&c.cycle), Ok(c.weight));
            }
        }
        let outcome = search(&dm, &config, &(1..=n).collect::<Vec<_>>(), usize::MAX);
        for c in &outcome.cycles {
            assert!(distinct(&created_edges(&d, &c.route)));
            assert!(c.weight < 0);
            if c.provenance == Provenance::ClosedAtSource {
                assert_eq!(c.route.first(), c.route.last());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_candidate_telescopes(seed in any::<u64>(), n in 4usize..=9) {
        let (m, dm) = instance(seed, n);
        let d = dm.base().clone();
        let before = m.permutation_cost(&d).unwrap();
        for c in candidates(&dm, &EngineConfig::default(), 64).cycles {
            let next = d.compose(&Permutation::from_cycles(&c.cycle)).unwrap();
            prop_assert_eq!(m.permutation_cost(&next).unwrap() - before, c.weight);
            prop_assert!(next.fixed_point().is_none());
        }
    }
}
