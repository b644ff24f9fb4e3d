use std::collections::{BTreeSet, VecDeque};

use kdefect::generators::gnp;
use kdefect::{
    brute_max_kdc, check_solution, club_bound, degeneracy_order, dp_tables, greedy_partition,
    heuristic_initial, induced_subgraph, is_k_defective_clique, is_k_defective_set,
    neighbors_after, parse_labeled, pcc_tables, random_instance, solve, two_hop_after, BoundKind,
    DpTables, FormatHint, Graph, Instance, SolveOptions, Vertex,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
            .flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v)))
            .collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let edges = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
            Graph::from_edges(n, edges)
        })
    })
}

fn bfs(g: &Graph, src: Vertex) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[src as usize] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize].unwrap();
        for &u in g.neighbors(v) {
            if dist[u as usize].is_none() {
                dist[u as usize] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

fn assert_monotone(tables: &DpTables) {
    for i in 0..tables.chi() {
        for r in 1..=tables.slack() {
            assert!(tables.t(i, r - 1) <= tables.t(i, r));
            assert!(tables.f(i, r - 1) <= tables.f(i, r));
        }
    }
}

fn first_fit_colors(g: &Graph) -> usize {
    let mut color = vec![usize::MAX; g.n()];
    let mut used = 0;
    for v in g.vertices() {
        let taken: BTreeSet<usize> = g.neighbors(v).iter().map(|&u| color[u as usize]).collect();
        let c = (0..).find(|c| !taken.contains(c)).unwrap();
        color[v as usize] = c;
        used = used.max(c + 1);
    }
    used
}

// Bucket by weight, color each bucket, cut it into groups of chi in
// weight-then-id order, penalize the j-th group by j - 1, take a prefix.
fn club_reference(inst: &Instance) -> usize {
    let slack = inst.slack() as usize;
    let live = inst.live_candidates();
    let mut w_c = Vec::new();
    for w in 0..=slack {
        let mut bucket: Vec<Vertex> = live
            .iter()
            .copied()
            .filter(|&v| inst.weight(v) == w)
            .collect();
        if bucket.is_empty() {
            continue;
        }
        bucket.sort_unstable();
        let chi = first_fit_colors(&induced_subgraph(inst.graph(), &bucket).graph);
        for (j, group) in bucket.chunks(chi).enumerate() {
            w_c.extend(group.iter().map(|_| w + j));
        }
    }
    w_c.sort_unstable();
    let mut spent = 0;
    let mut taken = 0;
    for c in w_c {
        spent += c;
        if spent > slack {
            break;
        }
        taken += 1;
    }
    inst.p_len() + taken
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn degeneracy_bounds_later_neighbors(g in graph_strategy(16)) {
        let ord = degeneracy_order(&g);
        let mut seen: Vec<Vertex> = ord.order().to_vec();
        seen.sort_unstable();
        prop_assert_eq!(seen, g.vertices().collect::<Vec<_>>());
        for v in g.vertices() {
            prop_assert!(neighbors_after(&g, &ord, v).len() <= ord.degeneracy());
        }
    }

    #[test]
    fn two_hop_is_disjoint_from_later_neighbors(g in graph_strategy(16)) {
        let ord = degeneracy_order(&g);
        for v in g.vertices() {
            let near: BTreeSet<Vertex> = neighbors_after(&g, &ord, v).into_iter().collect();
            for u in two_hop_after(&g, &ord, v) {
                prop_assert!(!near.contains(&u));
                prop_assert!(u != v && !g.has_edge(u, v));
                prop_assert!(ord.rank(u) > ord.rank(v));
                prop_assert!(g.neighbors(u).iter().any(|w| near.contains(w)));
            }
        }
    }

    #[test]
    fn edge_list_round_trips(g in graph_strategy(20)) {
        prop_assume!(g.m() > 0);
        let text = g.to_edge_list();
        let parsed = parse_labeled(text.as_bytes(), FormatHint::Auto).unwrap();
        let relabeled: BTreeSet<(u64, u64)> = parsed
            .graph
            .edges()
            .map(|(u, v)| {
                let (a, b) = (parsed.labels[u as usize], parsed.labels[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        let original: BTreeSet<(u64, u64)> = g.edges().map(|(u, v)| (u as u64, v as u64)).collect();
        prop_assert_eq!(relabeled, original);
    }

    #[test]
    fn subsets_of_defective_cliques_stay_defective(
        g in graph_strategy(12),
        k in 0usize..4,
        seed in any::<u64>(),
    ) {
        let best = brute_max_kdc(&g, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let sub: Vec<Vertex> =
                best.vertices.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            prop_assert!(is_k_defective_clique(&g, &sub, k));
        }
    }

    #[test]
    fn large_defective_cliques_have_diameter_two(g in graph_strategy(12), k in 0usize..4) {
        let best = brute_max_kdc(&g, k).unwrap();
        prop_assume!(best.vertices.len() >= k + 2);
        let sub = induced_subgraph(&g, &best.vertices).graph;
        for v in sub.vertices() {
            for d in bfs(&sub, v) {
                prop_assert!(matches!(d, Some(d) if d <= 2));
            }
        }
    }

    #[test]
    fn defective_sets_are_small_defective_cliques(
        g in graph_strategy(10),
        k in 0usize..4,
        mask in any::<u16>(),
    ) {
        let s: Vec<Vertex> = g.vertices().filter(|&v| mask >> v & 1 == 1).collect();
        if is_k_defective_set(&g, &s, k) {
            prop_assert!(is_k_defective_clique(&g, &s, k));
            prop_assert!(s.len() <= 2 * k);
        }
    }

    #[test]
    fn heuristic_output_is_valid(g in graph_strategy(20), k in 0usize..6) {
        let sol = heuristic_initial(&g, k);
        let checked = check_solution(&g, &sol.vertices, k).unwrap();
        prop_assert_eq!(checked.size, sol.vertices.len());
    }
}

#[test]
fn incremental_weights_match_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(2..=14);
        let g = gnp(n, rng.gen_range(0.1..0.9), &mut rng);
        let k = rng.gen_range(0..6);
        let mut inst = Instance::whole(g.clone(), k);
        let mut included: Vec<Vertex> = Vec::new();
        let mut excluded: Vec<Vertex> = Vec::new();
        for _ in 0..40 {
            let r = inst.r();
            match rng.gen_range(0..4) {
                0 if !r.is_empty() => {
                    let v = *r.choose(&mut rng).unwrap();
                    inst.include(v);
                    included.push(v);
                }
                1 if !r.is_empty() => {
                    let v = *r.choose(&mut rng).unwrap();
                    inst.exclude(v);
                    excluded.push(v);
                }
                2 if !included.is_empty() => {
                    let v = included.swap_remove(rng.gen_range(0..included.len()));
                    inst.uninclude(v);
                }
                3 if !excluded.is_empty() => {
                    let v = excluded.swap_remove(rng.gen_range(0..excluded.len()));
                    inst.unexclude(v);
                }
                _ => {}
            }
            let p = inst.p();
            let missing = kdefect::missing_edges(&g, &p) as i64;
            assert_eq!(inst.slack(), k as i64 - missing);
            assert_eq!(inst.p_len(), p.len());
            for u in g.vertices() {
                let seen = p.iter().filter(|&&v| g.has_edge(u, v)).count();
                assert_eq!(inst.weight(u), p.len() - seen);
                let r_seen = inst.r().iter().filter(|&&v| g.has_edge(u, v)).count();
                assert_eq!(inst.r_neighbors(u), r_seen);
            }
        }
    }
}

#[test]
fn dp_and_pcc_tables_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let inst = random_instance(&mut rng, (6, 14), 4);
        let part = greedy_partition(&inst);
        let lb = rng.gen_range(0..=inst.graph().n());
        if let Some(t) = dp_tables(&inst, &part) {
            assert_monotone(&t);
        }
        if let Some(t) = pcc_tables(&inst, lb, &part) {
            assert_monotone(&t);
        }
    }
}

#[test]
fn club_matches_direct_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, (6, 14), 4);
        assert_eq!(club_bound(&inst), club_reference(&inst));
    }
}

#[test]
fn sequential_runs_are_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let g = gnp(rng.gen_range(10..=40), rng.gen_range(0.2..0.6), &mut rng);
        let k = rng.gen_range(0..4);
        let opts = SolveOptions::new(k).bound(BoundKind::Pcc);
        let a = solve(&g, &opts);
        let b = solve(&g, &opts);
        assert!(a.stats.same_counts(&b.stats));
        assert_eq!(a.opt(), b.opt());
        assert!(a.best.size >= a.heuristic_size);
    }
}
