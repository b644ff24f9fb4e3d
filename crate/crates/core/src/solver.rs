//! Degeneracy-ordered decomposition into two-hop subinstances and the
//! driver that runs the branching search over them.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundKind;
use crate::branch::{Brancher, SearchStats};
use crate::graph::{
    degeneracy_order, induced_subgraph, neighbors_after, peel, two_hop_after, Graph, Vertex,
    VertexOrder,
};
use crate::model::{check_solution, pairs, Instance, Solution};

/// Best solution so far, shared between workers. Only ever grows.
#[derive(Debug, Default)]
pub struct Incumbent {
    size: AtomicUsize,
    best: Mutex<Vec<Vertex>>,
}

impl Incumbent {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn seeded(vertices: Vec<Vertex>) -> Self {
        Incumbent {
            size: AtomicUsize::new(vertices.len()),
            best: Mutex::new(vertices),
        }
    }

    /// May lag behind a concurrent improvement.
    pub fn size(&self) -> usize {
        self.size.load(Ordering::Acquire)
    }

    /// Replaces the incumbent when `vertices` is strictly larger.
    pub fn offer(&self, vertices: &[Vertex]) -> bool {
        if vertices.len() <= self.size() {
            return false;
        }
        let mut best = self.best.lock().unwrap();
        if vertices.len() <= best.len() {
            return false;
        }
        *best = vertices.to_vec();
        self.size.store(vertices.len(), Ordering::Release);
        true
    }

    pub fn best(&self) -> Vec<Vertex> {
        self.best.lock().unwrap().clone()
    }
}

/// Peels minimum-degree vertices (smallest id first) until what is left
/// is a k-defective clique.
pub fn heuristic_initial(g: &Graph, k: usize) -> Solution {
    let mut removed = vec![false; g.n()];
    let mut left = g.n();
    let mut edges = g.m();
    peel(g, |v, degree| {
        if pairs(left) - edges <= k {
            return ControlFlow::Break(());
        }
        removed[v as usize] = true;
        left -= 1;
        edges -= degree;
        ControlFlow::Continue(())
    });
    let kept: Vec<Vertex> = g.vertices().filter(|&v| !removed[v as usize]).collect();
    check_solution(g, &kept, k).expect("peeling stops at a k-defective clique")
}

/// A subinstance with the map from its local ids to the input graph.
#[derive(Clone, Debug)]
pub struct Subinstance {
    pub instance: Instance,
    pub to_global: Vec<Vertex>,
}

/// `I′_i` (with `v_i` in `P` and its later one- and two-hop neighbors as
/// `R`) and `I″_i` (with `P = ∅` and `R = N⁺(v_i)`). Local id 0 is `v_i`;
/// the rest follow in increasing original id.
pub fn build_subinstances(
    g: &Graph,
    ord: &VertexOrder,
    i: usize,
    k: usize,
) -> (Subinstance, Subinstance) {
    build_filtered(g, ord, i, k, |_| true)
}

fn build_filtered<F: Fn(Vertex) -> bool>(
    g: &Graph,
    ord: &VertexOrder,
    i: usize,
    k: usize,
    keep: F,
) -> (Subinstance, Subinstance) {
    let v = ord.order()[i];
    let mut near: Vec<Vertex> = neighbors_after(g, ord, v);
    near.retain(|&u| keep(u));
    near.sort_unstable();
    let mut far: Vec<Vertex> = two_hop_after(g, ord, v);
    far.retain(|&u| keep(u) && g.neighbors(u).iter().any(|w| near.binary_search(w).is_ok()));
    let mut reach: Vec<Vertex> = near.iter().chain(&far).copied().collect();
    reach.sort_unstable();
    (make(g, v, &reach, k, true), make(g, v, &near, k, false))
}

fn make(g: &Graph, v: Vertex, rest: &[Vertex], k: usize, v_in_p: bool) -> Subinstance {
    let mut verts = Vec::with_capacity(rest.len() + 1);
    verts.push(v);
    verts.extend_from_slice(rest);
    let sub = induced_subgraph(g, &verts);
    let r: Vec<Vertex> = (1..verts.len() as Vertex).collect();
    let p: &[Vertex] = if v_in_p { &[0] } else { &[] };
    Subinstance {
        instance: Instance::new(sub.graph, k, p, &r).expect("local ids are distinct and in range"),
        to_global: sub.to_global,
    }
}

/// Ten-hour-scale default cutoff, in seconds.
pub const DEFAULT_TIME_LIMIT_SECS: u64 = 10800;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub k: usize,
    pub bound: BoundKind,
    pub time_limit: Option<Duration>,
    /// 1 runs subinstances in order; more spreads them over a thread pool,
    /// which makes node counts run-dependent.
    pub threads: usize,
}

impl SolveOptions {
    pub fn new(k: usize) -> Self {
        SolveOptions {
            k,
            bound: BoundKind::Pcc,
            time_limit: Some(Duration::from_secs(DEFAULT_TIME_LIMIT_SECS)),
            threads: 1,
        }
    }

    pub fn bound(mut self, bound: BoundKind) -> Self {
        self.bound = bound;
        self
    }

    pub fn time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }
}

/// Outcome of [`solve`]. `solution` is `None` ("no") when nothing of size
/// at least `k + 2` was found; `best` keeps the incumbent regardless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(with = "no_or_solution")]
    pub solution: Option<Solution>,
    pub best: Solution,
    pub stats: SearchStats,
    pub k: usize,
    pub bound: BoundKind,
    pub time_limit_secs: Option<f64>,
    pub n: usize,
    pub m: usize,
    pub degeneracy: usize,
    pub heuristic_size: usize,
    /// False when the time limit cut the search short.
    pub complete: bool,
}

impl SolveReport {
    pub fn opt(&self) -> Option<usize> {
        self.solution.as_ref().map(|s| s.size)
    }
}

mod no_or_solution {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::model::Solution;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Found(Solution),
        Word(String),
    }

    pub fn serialize<S: Serializer>(s: &Option<Solution>, ser: S) -> Result<S::Ok, S::Error> {
        match s {
            Some(sol) => sol.serialize(ser),
            None => ser.serialize_str("no"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Solution>, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Found(sol) => Ok(Some(sol)),
            Repr::Word(w) if w == "no" => Ok(None),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a solution or \"no\", got {w:?}"
            ))),
        }
    }
}

const SEARCH_STACK_BYTES: usize = 512 << 20;

/// Exact maximum k-defective clique of size at least `k + 2`, if any.
pub fn solve(g: &Graph, opts: &SolveOptions) -> SolveReport {
    let start = Instant::now();
    let deadline = opts.time_limit.map(|t| start + t);
    let k = opts.k;
    let ord = degeneracy_order(g);
    let mut report = SolveReport {
        solution: None,
        best: Solution::empty(k),
        stats: SearchStats::default(),
        k,
        bound: opts.bound,
        time_limit_secs: opts.time_limit.map(|t| t.as_secs_f64()),
        n: g.n(),
        m: g.m(),
        degeneracy: ord.degeneracy(),
        heuristic_size: 0,
        complete: true,
    };
    if g.n() < k + 2 {
        report.stats.wall_seconds = start.elapsed().as_secs_f64();
        return report;
    }

    let heuristic = heuristic_initial(g, k);
    report.heuristic_size = heuristic.size;
    let incumbent = Incumbent::seeded(heuristic.vertices);
    let core = ord.core_numbers();
    let stopped = AtomicBool::new(false);

    let run_one = |i: usize| -> SearchStats {
        let mut stats = SearchStats::default();
        if stopped.load(Ordering::Relaxed) {
            return stats;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            stopped.store(true, Ordering::Relaxed);
            return stats;
        }
        // Only solutions of k + 2 or more are reported, so search as if one
        // of size k + 1 were known. Members of a solution larger than lb
        // have core number >= lb - k.
        let lb = incumbent.size().max(k + 1);
        let v = ord.order()[i];
        let min_core = lb.saturating_sub(k);
        if (core[v as usize] as usize) < min_core {
            return stats;
        }
        let (first, second) =
            build_filtered(g, &ord, i, k, |u| core[u as usize] as usize >= min_core);
        for mut sub in [first, second] {
            if sub.instance.graph().n() <= incumbent.size().max(k + 1) {
                continue;
            }
            let mut b = Brancher::new(opts.bound, &incumbent, &sub.to_global)
                .deadline(deadline)
                .floor(k + 1);
            b.run(&mut sub.instance);
            let (s, _, timed_out) = b.into_parts();
            stats.merge(&s);
            if timed_out {
                stopped.store(true, Ordering::Relaxed);
                break;
            }
        }
        stats
    };

    let total = if opts.threads <= 1 {
        std::thread::scope(|scope| {
            std::thread::Builder::new()
                .stack_size(SEARCH_STACK_BYTES)
                .spawn_scoped(scope, || {
                    let mut total = SearchStats::default();
                    for i in 0..g.n() {
                        total.merge(&run_one(i));
                    }
                    total
                })
                .expect("spawn search thread")
                .join()
                .expect("search thread panicked")
        })
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .stack_size(SEARCH_STACK_BYTES)
            .build()
            .expect("build thread pool");
        pool.install(|| {
            (0..g.n())
                .into_par_iter()
                .with_max_len(1)
                .map(run_one)
                .reduce(SearchStats::default, |mut a, b| {
                    a.merge(&b);
                    a
                })
        })
    };

    report.stats = total;
    report.complete = !stopped.load(Ordering::Relaxed);
    report.best = check_solution(g, &incumbent.best(), k).expect("incumbent is always valid");
    if report.best.size >= k + 2 {
        report.solution = Some(report.best.clone());
    }
    report.stats.wall_seconds = start.elapsed().as_secs_f64();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, complete_minus, gnp, path};
    use crate::model::is_k_defective_clique;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn heuristic_examples() {
        let h = heuristic_initial(&complete(5), 1);
        assert_eq!(h.size, 5);
        // K5 on 0..5 plus pendant 5 hanging off 0
        let mut edges: Vec<_> = complete(5).edges().collect();
        edges.push((0, 5));
        let g = Graph::from_edges(6, edges);
        assert_eq!(heuristic_initial(&g, 0).vertices, vec![0, 1, 2, 3, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let g = gnp(50, 0.3, &mut rng);
        let h = heuristic_initial(&g, 2);
        assert!(is_k_defective_clique(&g, &h.vertices, 2));
    }

    #[test]
    fn subinstance_examples() {
        let g = Graph::empty(3);
        let ord = degeneracy_order(&g);
        let (a, b) = build_subinstances(&g, &ord, 0, 1);
        assert_eq!((a.instance.graph().n(), a.instance.r_len()), (1, 0));
        assert_eq!((b.instance.graph().n(), b.instance.r_len()), (1, 0));

        let g = complete(5);
        let ord = degeneracy_order(&g);
        let (a, b) = build_subinstances(&g, &ord, 0, 2);
        assert_eq!(a.instance.graph().m(), 10);
        assert_eq!(a.instance.r_len(), 4);
        assert_eq!(a.instance.p_len(), 1);
        assert_eq!(b.instance.p_len(), 0);

        let g = path(4);
        let ord = degeneracy_order(&g);
        assert_eq!(ord.order()[0], 0);
        let (a, b) = build_subinstances(&g, &ord, 0, 1);
        assert_eq!(a.to_global, vec![0, 1, 2]);
        assert_eq!(a.instance.r(), vec![1, 2]);
        assert_eq!(a.instance.weight(2), 1);
        assert_eq!(a.instance.slack(), 1);
        assert_eq!(b.to_global, vec![0, 1]);
    }

    #[test]
    fn solve_examples() {
        for n in 3..7 {
            for k in 0..n - 1 {
                let r = solve(&complete(n), &SolveOptions::new(k));
                assert_eq!(r.opt(), Some(n), "K{n}, k={k}");
            }
        }
        let g = complete_minus(5, &[(0, 1), (2, 3)]);
        assert_eq!(solve(&g, &SolveOptions::new(2)).opt(), Some(5));
        let r = solve(&complete(3), &SolveOptions::new(2));
        assert_eq!(r.opt(), None);
    }

    #[test]
    fn report_json_round_trip() {
        let r = solve(&complete(4), &SolveOptions::new(1));
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SolveReport>(&text).unwrap(), r);
        let none = solve(&complete(2), &SolveOptions::new(1));
        let v = serde_json::to_value(&none).unwrap();
        assert_eq!(v["solution"], "no");
        assert_eq!(serde_json::from_value::<SolveReport>(v).unwrap(), none);
    }

    #[test]
    fn incumbent_only_grows() {
        let inc = Incumbent::new();
        assert!(inc.offer(&[1, 2]));
        assert!(!inc.offer(&[3]));
        assert!(!inc.offer(&[3, 4]));
        assert!(inc.offer(&[5, 6, 7]));
        assert_eq!(inc.best(), vec![5, 6, 7]);
    }

    #[test]
    fn parallel_agrees_with_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let g = gnp(30, 0.4, &mut rng);
            let a = solve(&g, &SolveOptions::new(2));
            let b = solve(&g, &SolveOptions::new(2).threads(4));
            assert_eq!(a.best.size, b.best.size);
        }
    }

    #[test]
    fn sequential_runs_repeat() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = gnp(40, 0.3, &mut rng);
        let a = solve(&g, &SolveOptions::new(3));
        let b = solve(&g, &SolveOptions::new(3));
        assert!(a.stats.same_counts(&b.stats));
        assert_eq!(a.best, b.best);
    }
}
