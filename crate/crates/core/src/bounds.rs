//! Upper bounds on the best solution reachable from an instance.
//!
//! Every bound looks only at the live candidates of `V \ P` (see
//! [`Instance::live_candidates`]) and charges each one its weight against
//! the slack `r(P)`. Partition-based bounds additionally charge the missing
//! edges inside each independent set, and [`pack_color_conf`] further
//! refuses to take two vertices of a class that are known to conflict.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{induced_subgraph, Graph, Vertex};
use crate::model::{pairs, Instance, Role};

/// Which bound the search uses to cut branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    None,
    Packing,
    Coloring,
    Sorting,
    Club,
    Dp,
    Pcc,
}

impl BoundKind {
    /// Every real bound, weakest-first roughly.
    pub const ALL: [BoundKind; 6] = [
        BoundKind::Packing,
        BoundKind::Coloring,
        BoundKind::Sorting,
        BoundKind::Club,
        BoundKind::Dp,
        BoundKind::Pcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::None => "none",
            BoundKind::Packing => "packing",
            BoundKind::Coloring => "coloring",
            BoundKind::Sorting => "sorting",
            BoundKind::Club => "club",
            BoundKind::Dp => "dp",
            BoundKind::Pcc => "pcc",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [BoundKind::None]
            .into_iter()
            .chain(BoundKind::ALL)
            .find(|b| b.name() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                format!("unknown bound {s:?}; expected one of none, packing, coloring, sorting, club, dp, pcc")
            })
    }
}

/// Disjoint independent sets covering the live candidates of `V \ P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<Vertex>>,
}

impl Partition {
    pub fn new(classes: Vec<Vec<Vertex>>) -> Self {
        Partition { classes }
    }

    pub fn classes(&self) -> &[Vec<Vertex>] {
        &self.classes
    }

    pub fn chi(&self) -> usize {
        self.classes.len()
    }
}

/// Greedy sequential coloring of the live candidates, scanned in the
/// degeneracy order of the instance graph. Classes are sorted by id.
pub fn greedy_partition(inst: &Instance) -> Partition {
    let g = inst.graph();
    let live = inst.live_mask();
    let order: Vec<Vertex> = inst
        .degeneracy_scan()
        .iter()
        .copied()
        .filter(|&v| live[v as usize])
        .collect();
    let mut classes = greedy_color(g, &order);
    for c in &mut classes {
        c.sort_unstable();
    }
    Partition { classes }
}

// First-fit coloring of `g` visiting `order`; returns the color classes.
fn greedy_color(g: &Graph, order: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut color = vec![usize::MAX; g.n()];
    let mut classes: Vec<Vec<Vertex>> = Vec::new();
    let mut stamp: Vec<usize> = Vec::new();
    for (step, &v) in order.iter().enumerate() {
        for &u in g.neighbors(v) {
            let c = color[u as usize];
            if c != usize::MAX {
                stamp[c] = step + 1;
            }
        }
        let c = (0..classes.len())
            .find(|&c| stamp[c] != step + 1)
            .unwrap_or(classes.len());
        if c == classes.len() {
            classes.push(Vec::new());
            stamp.push(0);
        }
        color[v as usize] = c;
        classes[c].push(v);
    }
    classes
}

/// Largest `s` with `s(s-1)/2 <= k`: the most vertices of one independent
/// set that fit in a k-defective clique.
pub fn coloring_cap(k: usize) -> usize {
    let mut s = 0;
    while pairs(s + 1) <= k {
        s += 1;
    }
    s
}

fn usable_slack(inst: &Instance) -> Option<usize> {
    (inst.slack() >= 0).then(|| inst.slack() as usize)
}

// Longest prefix of `costs` (taken in the given order) whose sum fits.
fn prefix_within(costs: impl IntoIterator<Item = usize>, budget: usize) -> usize {
    let mut spent = 0;
    let mut taken = 0;
    for c in costs {
        spent += c;
        if spent > budget {
            break;
        }
        taken += 1;
    }
    taken
}

/// Packing: take candidates cheapest-weight first while the total weight
/// stays within `r(P)`.
pub fn packing_bound(inst: &Instance) -> usize {
    let Some(slack) = usable_slack(inst) else {
        return inst.p_len();
    };
    let mut w: Vec<usize> = inst
        .live_candidates()
        .iter()
        .map(|&v| inst.weight(v))
        .collect();
    w.sort_unstable();
    inst.p_len() + prefix_within(w, slack)
}

/// Coloring: at most [`coloring_cap`] vertices from each class.
pub fn coloring_bound(inst: &Instance, part: &Partition) -> usize {
    let cap = coloring_cap(inst.k());
    inst.p_len()
        + part
            .classes()
            .iter()
            .map(|c| c.len().min(cap))
            .sum::<usize>()
}

// (weight, id) pairs of a class, cheapest first.
fn sorted_class(inst: &Instance, class: &[Vertex]) -> Vec<(usize, Vertex)> {
    let mut c: Vec<(usize, Vertex)> = class.iter().map(|&v| (inst.weight(v), v)).collect();
    c.sort_unstable();
    c
}

/// Sorting: the j-th cheapest vertex of a class costs `w + j - 1`; take the
/// globally cheapest such costs within `r(P)`.
pub fn sorting_bound(inst: &Instance, part: &Partition) -> usize {
    let Some(slack) = usable_slack(inst) else {
        return inst.p_len();
    };
    let mut costs: Vec<usize> = part
        .classes()
        .iter()
        .flat_map(|class| {
            sorted_class(inst, class)
                .into_iter()
                .enumerate()
                .map(|(j, (w, _))| w + j)
        })
        .collect();
    costs.sort_unstable();
    inst.p_len() + prefix_within(costs, slack)
}

/// Club: bucket candidates by weight, color each bucket, and charge the
/// j-th group of `χ_i` vertices in a bucket an extra `j - 1`.
pub fn club_bound(inst: &Instance) -> usize {
    let Some(slack) = usable_slack(inst) else {
        return inst.p_len();
    };
    let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); slack + 1];
    for v in inst.live_candidates() {
        buckets[inst.weight(v)].push(v);
    }
    let mut costs = Vec::new();
    for (w, bucket) in buckets.iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        let sub = induced_subgraph(inst.graph(), bucket);
        let order: Vec<Vertex> = sub.graph.vertices().collect();
        let chi = greedy_color(&sub.graph, &order).len();
        costs.extend((0..bucket.len()).map(|j| w + j / chi));
    }
    costs.sort_unstable();
    inst.p_len() + prefix_within(costs, slack)
}

/// The `t` and `f` tables of the class-by-class dynamic program.
///
/// `t(i, r)` is how many vertices class `i` can contribute within budget
/// `r`; `f(i, r)` is the best total over classes `0..=i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTables {
    t: Vec<Vec<usize>>,
    f: Vec<Vec<usize>>,
    slack: usize,
}

impl DpTables {
    /// Each row lists the non-decreasing per-step costs of one class; taking
    /// `j` steps costs `C(j, 2)` plus the first `j` costs.
    pub fn from_step_costs(rows: &[Vec<usize>], slack: usize) -> Self {
        let t: Vec<Vec<usize>> = rows.iter().map(|costs| t_row(costs, slack)).collect();
        let mut f: Vec<Vec<usize>> = Vec::with_capacity(t.len());
        for (i, ti) in t.iter().enumerate() {
            let row = if i == 0 {
                ti.clone()
            } else {
                let prev = &f[i - 1];
                (0..=slack)
                    .map(|r| {
                        (0..=r)
                            .map(|split| prev[split] + ti[r - split])
                            .max()
                            .unwrap()
                    })
                    .collect()
            };
            f.push(row);
        }
        DpTables { t, f, slack }
    }

    pub fn chi(&self) -> usize {
        self.t.len()
    }

    pub fn slack(&self) -> usize {
        self.slack
    }

    /// `t(i, r)`, classes indexed from 0.
    pub fn t(&self, i: usize, r: usize) -> usize {
        self.t[i][r]
    }

    pub fn f(&self, i: usize, r: usize) -> usize {
        self.f[i][r]
    }

    /// `f(χ, r(P))`, or 0 with no classes.
    pub fn value(&self) -> usize {
        self.f.last().map_or(0, |row| row[self.slack])
    }
}

fn t_row(costs: &[usize], slack: usize) -> Vec<usize> {
    let mut row = Vec::with_capacity(slack + 1);
    let mut j = 0;
    let mut spent = 0;
    for r in 0..=slack {
        while j < costs.len() && spent + j + costs[j] <= r {
            spent += j + costs[j];
            j += 1;
        }
        row.push(j);
    }
    row
}

/// DP tables for the partition without conflict information.
pub fn dp_tables(inst: &Instance, part: &Partition) -> Option<DpTables> {
    let slack = usable_slack(inst)?;
    let rows: Vec<Vec<usize>> = part
        .classes()
        .iter()
        .map(|class| {
            sorted_class(inst, class)
                .into_iter()
                .map(|(w, _)| w)
                .collect()
        })
        .collect();
    Some(DpTables::from_step_costs(&rows, slack))
}

/// Exact optimum of the packing-and-coloring program: the best way to
/// split `r(P)` across classes, each taking its cheapest vertices.
pub fn dp_bound(inst: &Instance, part: &Partition) -> usize {
    inst.p_len() + dp_tables(inst, part).map_or(0, |t| t.value())
}

/// Which conflict rule identified a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConflictRule {
    /// Non-adjacent, one in `R` and one outside `P ∪ R`.
    CandidateOutside,
    /// Non-adjacent, both outside `P ∪ R`.
    BothOutside,
    /// Adding both overdraws the slack.
    SlackExhausted,
    /// Adjacent, too few common candidates to beat the lower bound.
    AdjacentSparse,
    /// Non-adjacent, too few common candidates to beat the lower bound.
    NonAdjacentSparse,
}

/// The first rule that makes `u` and `v` unable to share a solution larger
/// than `lb`. `live` marks the vertices that may still join a solution;
/// common neighbors are only counted among them.
pub fn conflict_rule(
    inst: &Instance,
    lb: usize,
    live: &[bool],
    u: Vertex,
    v: Vertex,
) -> Option<ConflictRule> {
    let g = inst.graph();
    let adjacent = g.has_edge(u, v);
    let (ru, rv) = (inst.role(u), inst.role(v));
    debug_assert!(ru != Role::P && rv != Role::P && u != v);
    if !adjacent {
        match (ru, rv) {
            (Role::Outside, Role::Outside) => return Some(ConflictRule::BothOutside),
            (Role::Outside, Role::R) | (Role::R, Role::Outside) => {
                return Some(ConflictRule::CandidateOutside)
            }
            _ => {}
        }
    }
    let (wu, wv) = (inst.weight(u) as i64, inst.weight(v) as i64);
    let slack_both = inst.slack() - wu - wv - (!adjacent) as i64;
    if slack_both < 0 {
        return Some(ConflictRule::SlackExhausted);
    }
    let threshold = lb as i64 - (inst.p_len() as i64 + inst.slack() - wu - wv);
    let limit = threshold - if adjacent { 2 } else { 1 };
    if limit < 0 || count_common(g, live, u, v, limit as usize + 1) as i64 > limit {
        return None;
    }
    Some(if adjacent {
        ConflictRule::AdjacentSparse
    } else {
        ConflictRule::NonAdjacentSparse
    })
}

// Live common neighbors of `u` and `v`, counting no further than `cap`.
fn count_common(g: &Graph, live: &[bool], u: Vertex, v: Vertex, cap: usize) -> usize {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() && count < cap {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += live[a[i] as usize] as usize;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Lazily evaluated, memoized conflict verdicts for one instance snapshot.
#[derive(Clone, Debug)]
pub struct ConflictOracle {
    lb: usize,
    live: Vec<bool>,
    verdicts: HashMap<(Vertex, Vertex), bool>,
}

impl ConflictOracle {
    pub fn new(inst: &Instance, lb: usize) -> Self {
        let live = inst.live_mask();
        ConflictOracle {
            lb,
            live,
            verdicts: HashMap::new(),
        }
    }

    pub fn lb(&self) -> usize {
        self.lb
    }

    pub fn conflict(&mut self, inst: &Instance, u: Vertex, v: Vertex) -> bool {
        let key = (u.min(v), u.max(v));
        if let Some(&known) = self.verdicts.get(&key) {
            return known;
        }
        let verdict = conflict_rule(inst, self.lb, &self.live, u, v).is_some();
        self.verdicts.insert(key, verdict);
        verdict
    }

    /// Verdict already computed for the pair, if any.
    pub fn cached(&self, u: Vertex, v: Vertex) -> Option<bool> {
        self.verdicts.get(&(u.min(v), u.max(v))).copied()
    }
}

/// Evaluates the conflict rules for every listed pair of `V \ P`.
pub fn build_conflicts(inst: &Instance, lb: usize, pairs: &[(Vertex, Vertex)]) -> ConflictOracle {
    let mut oracle = ConflictOracle::new(inst, lb);
    for &(u, v) in pairs {
        oracle.conflict(inst, u, v);
    }
    oracle
}

/// Splits a cheapest-first class into layers of pairwise-conflicting
/// vertices: each pass scans what is left and keeps a vertex when it
/// conflicts with everything already in the layer.
pub fn conflict_layers<T: Copy, F>(sorted: &[T], mut conflict: F) -> Vec<Vec<T>>
where
    F: FnMut(T, T) -> bool,
{
    let mut rest: Vec<T> = sorted.to_vec();
    let mut layers = Vec::new();
    while !rest.is_empty() {
        let mut layer: Vec<T> = Vec::new();
        let mut left = Vec::with_capacity(rest.len());
        for &x in &rest {
            if layer.is_empty() || layer.iter().all(|&y| conflict(y, x)) {
                layer.push(x);
            } else {
                left.push(x);
            }
        }
        layers.push(layer);
        rest = left;
    }
    layers
}

/// DP tables where class `i` may use at most one vertex per conflict layer,
/// each layer charged its cheapest weight.
pub fn pcc_tables_with<F>(
    classes: &[Vec<(usize, Vertex)>],
    slack: usize,
    mut conflict: F,
) -> DpTables
where
    F: FnMut(Vertex, Vertex) -> bool,
{
    let rows: Vec<Vec<usize>> = classes
        .iter()
        .map(|class| {
            conflict_layers(class, |a, b| conflict(a.1, b.1))
                .iter()
                .map(|layer| layer.iter().map(|&(w, _)| w).min().unwrap())
                .collect()
        })
        .collect();
    DpTables::from_step_costs(&rows, slack)
}

pub fn pcc_tables(inst: &Instance, lb: usize, part: &Partition) -> Option<DpTables> {
    let slack = usable_slack(inst)?;
    let live = inst.live_mask();
    let classes: Vec<Vec<(usize, Vertex)>> = part
        .classes()
        .iter()
        .map(|c| sorted_class(inst, c))
        .collect();
    // layering asks about each pair at most once, so no memo
    Some(pcc_tables_with(&classes, slack, |u, v| {
        conflict_rule(inst, lb, &live, u, v).is_some()
    }))
}

/// Packing, coloring and conflicts combined.
pub fn pack_color_conf(inst: &Instance, lb: usize, part: &Partition) -> usize {
    inst.p_len() + pcc_tables(inst, lb, part).map_or(0, |t| t.value())
}

/// Value of bound `kind`; [`BoundKind::None`] never prunes.
pub fn evaluate(kind: BoundKind, inst: &Instance, lb: usize) -> usize {
    match kind {
        BoundKind::None => usize::MAX,
        BoundKind::Packing => packing_bound(inst),
        BoundKind::Club => club_bound(inst),
        _ => evaluate_with_partition(kind, inst, lb, &greedy_partition(inst)),
    }
}

/// Like [`evaluate`] but with a caller-supplied partition.
pub fn evaluate_with_partition(
    kind: BoundKind,
    inst: &Instance,
    lb: usize,
    part: &Partition,
) -> usize {
    match kind {
        BoundKind::None => usize::MAX,
        BoundKind::Packing => packing_bound(inst),
        BoundKind::Coloring => coloring_bound(inst, part),
        BoundKind::Sorting => sorting_bound(inst, part),
        BoundKind::Club => club_bound(inst),
        BoundKind::Dp => dp_bound(inst, part),
        BoundKind::Pcc => pack_color_conf(inst, lb, part),
    }
}
