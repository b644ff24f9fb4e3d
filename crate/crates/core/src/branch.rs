//! Enumeration of k-defective sets with clique completion.
//!
//! Each call explores the k-defective sets `D` with `P ⊆ D ⊆ P ∪ R`. At a
//! leaf the set is completed with a maximum clique of its common
//! neighborhood and offered to the shared incumbent.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate, BoundKind};
use crate::clique::max_clique;
use crate::graph::{common_neighbors, induced_subgraph, Vertex};
use crate::model::{Instance, Role};
use crate::solver::Incumbent;

/// Counters for one search. `wall_seconds` is filled in by the solver.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub bound_prunes: u64,
    pub reduction_applications: u64,
    pub mc_calls: u64,
    pub wall_seconds: f64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.bound_prunes += other.bound_prunes;
        self.reduction_applications += other.reduction_applications;
        self.mc_calls += other.mc_calls;
    }

    /// Equality of every counter, ignoring wall time.
    pub fn same_counts(&self, other: &SearchStats) -> bool {
        (
            self.nodes,
            self.bound_prunes,
            self.reduction_applications,
            self.mc_calls,
        ) == (
            other.nodes,
            other.bound_prunes,
            other.reduction_applications,
            other.mc_calls,
        )
    }
}

/// What happened at a search node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// `r(P) < 0`, or some member of `P` sees every other vertex of `P ∪ R`.
    Dead,
    /// The bound did not exceed the incumbent size.
    BoundPrune { bound: usize, lb: usize },
    /// `r(P) = 0` or `R = ∅`: `P` completed by a clique over `C`.
    Leaf { common: Vec<Vertex>, clique: usize },
    /// `v` sees every other vertex of `P ∪ R` and was dropped from `R`.
    Reduce(Vertex),
    /// Include-then-exclude branching on `v`.
    Branch(Vertex),
}

/// Hooks into the search, for tests and instrumentation. Vertex ids are
/// local to the instance graph.
pub trait SearchObserver {
    /// Called at every node that survives the feasibility checks, before
    /// the bound is evaluated.
    fn visit(&mut self, _inst: &Instance, _lb: usize) {}

    fn event(&mut self, _inst: &Instance, _event: &Event) {}
}

/// Does nothing.
pub struct Silent;

impl SearchObserver for Silent {}

/// Records `(P sorted, event)` for every node.
#[derive(Default, Debug)]
pub struct Trace {
    pub events: Vec<(Vec<Vertex>, Event)>,
}

impl SearchObserver for Trace {
    fn event(&mut self, inst: &Instance, event: &Event) {
        let mut p = inst.p_members().to_vec();
        p.sort_unstable();
        self.events.push((p, event.clone()));
    }
}

/// The max-weight vertex of `R`, smallest id on ties.
pub fn select_branch_vertex(inst: &Instance) -> Option<Vertex> {
    inst.graph()
        .vertices()
        .filter(|&v| inst.role(v) == Role::R)
        .fold(None, |best: Option<Vertex>, v| match best {
            Some(b) if inst.weight(b) >= inst.weight(v) => Some(b),
            _ => Some(v),
        })
}

const DEADLINE_CHECK_EVERY: u64 = 256;

/// One search worker over a single instance graph.
pub struct Brancher<'a, O: SearchObserver = Silent> {
    bound: BoundKind,
    incumbent: &'a Incumbent,
    to_global: &'a [Vertex],
    deadline: Option<Instant>,
    floor: usize,
    observer: O,
    stats: SearchStats,
    timed_out: bool,
}

impl<'a> Brancher<'a, Silent> {
    pub fn new(bound: BoundKind, incumbent: &'a Incumbent, to_global: &'a [Vertex]) -> Self {
        Brancher::with_observer(bound, incumbent, to_global, Silent)
    }
}

impl<'a, O: SearchObserver> Brancher<'a, O> {
    /// `to_global` maps instance ids to the ids the incumbent stores.
    pub fn with_observer(
        bound: BoundKind,
        incumbent: &'a Incumbent,
        to_global: &'a [Vertex],
        observer: O,
    ) -> Self {
        Brancher {
            bound,
            incumbent,
            to_global,
            deadline: None,
            floor: 0,
            observer,
            stats: SearchStats::default(),
            timed_out: false,
        }
    }

    pub fn deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    /// Prune as if the incumbent had at least `floor` vertices.
    pub fn floor(mut self, floor: usize) -> Self {
        self.floor = floor;
        self
    }

    pub fn time_limit(self, limit: Duration) -> Self {
        self.deadline(Some(Instant::now() + limit))
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn observer(&self) -> &O {
        &self.observer
    }

    pub fn into_parts(self) -> (SearchStats, O, bool) {
        (self.stats, self.observer, self.timed_out)
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    /// Explores the instance. It is left as it was found.
    pub fn run(&mut self, inst: &mut Instance) {
        self.branch(inst);
    }

    fn branch(&mut self, inst: &mut Instance) {
        if self.timed_out {
            return;
        }
        self.stats.nodes += 1;
        if self.stats.nodes.is_multiple_of(DEADLINE_CHECK_EVERY)
            && self.deadline.is_some_and(|d| Instant::now() >= d)
        {
            self.timed_out = true;
            return;
        }

        if inst.slack() < 0
            || inst
                .p_members()
                .iter()
                .any(|&u| inst.sees_all_candidates(u))
        {
            self.observer.event(inst, &Event::Dead);
            return;
        }

        let lb = self.incumbent.size().max(self.floor);
        self.observer.visit(inst, lb);
        if self.bound != BoundKind::None {
            let bound = evaluate(self.bound, inst, lb);
            if bound <= lb {
                self.stats.bound_prunes += 1;
                self.observer.event(inst, &Event::BoundPrune { bound, lb });
                return;
            }
        }

        if inst.slack() == 0 || inst.r_len() == 0 {
            self.complete_with_clique(inst, lb);
            return;
        }

        let reducible = inst
            .graph()
            .vertices()
            .find(|&v| inst.role(v) == Role::R && inst.sees_all_candidates(v));
        if let Some(v) = reducible {
            self.stats.reduction_applications += 1;
            self.observer.event(inst, &Event::Reduce(v));
            inst.exclude(v);
            self.branch(inst);
            inst.unexclude(v);
            return;
        }

        let v = select_branch_vertex(inst).expect("R is non-empty here");
        self.observer.event(inst, &Event::Branch(v));
        inst.include(v);
        self.branch(inst);
        inst.uninclude(v);
        inst.exclude(v);
        self.branch(inst);
        inst.unexclude(v);
    }

    fn complete_with_clique(&mut self, inst: &Instance, lb: usize) {
        let g = inst.graph();
        let common = if inst.p_len() == 0 {
            g.vertices().collect()
        } else {
            common_neighbors(g, inst.p_members()).expect("P is non-empty")
        };
        let sub = induced_subgraph(g, &common);
        self.stats.mc_calls += 1;
        let clique = max_clique(&sub.graph, lb.saturating_sub(inst.p_len()));
        self.observer.event(
            inst,
            &Event::Leaf {
                common: common.clone(),
                clique: clique.size,
            },
        );
        if inst.p_len() + clique.size > lb {
            let found: Vec<Vertex> = inst
                .p_members()
                .iter()
                .copied()
                .chain(clique.vertices.iter().map(|&i| sub.to_global[i as usize]))
                .map(|v| self.to_global[v as usize])
                .collect();
            self.incumbent.offer(&found);
        }
    }
}
