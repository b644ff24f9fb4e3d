//! k-defective cliques, k-defective sets, and the `(G, P, R)` search instance.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{degeneracy_order, Graph, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("vertex {0} is not in the graph")]
    OutOfRange(Vertex),
    #[error("vertex {0} listed twice")]
    Duplicate(Vertex),
    #[error("not a {k}-defective clique: {missing} missing edges")]
    NotKDefective { missing: usize, k: usize },
}

/// Number of non-adjacent pairs inside `s`.
pub fn missing_edges(g: &Graph, s: &[Vertex]) -> usize {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    let present: usize = sorted
        .iter()
        .map(|&u| {
            g.neighbors(u)
                .iter()
                .filter(|v| sorted.binary_search(v).is_ok())
                .count()
        })
        .sum::<usize>()
        / 2;
    pairs(s.len()) - present
}

#[inline]
pub(crate) fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn is_k_defective_clique(g: &Graph, s: &[Vertex], k: usize) -> bool {
    missing_edges(g, s) <= k
}

/// A k-defective clique in which every member misses at least one other
/// member. The empty set qualifies.
pub fn is_k_defective_set(g: &Graph, s: &[Vertex], k: usize) -> bool {
    if missing_edges(g, s) > k {
        return false;
    }
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    sorted.iter().all(|&u| {
        let inside = g
            .neighbors(u)
            .iter()
            .filter(|v| sorted.binary_search(v).is_ok())
            .count();
        inside + 1 < sorted.len()
    })
}

/// A validated k-defective clique of the input graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub size: usize,
    pub vertices: Vec<Vertex>,
    pub nontrivial: bool,
    pub k: usize,
}

impl Solution {
    pub fn empty(k: usize) -> Self {
        Solution {
            size: 0,
            vertices: Vec::new(),
            nontrivial: false,
            k,
        }
    }
}

/// Validates `s` and wraps it as a [`Solution`]; `nontrivial` means
/// `|s| >= k + 2`.
pub fn check_solution(g: &Graph, s: &[Vertex], k: usize) -> Result<Solution, ModelError> {
    let mut vertices = s.to_vec();
    vertices.sort_unstable();
    for w in vertices.windows(2) {
        if w[0] == w[1] {
            return Err(ModelError::Duplicate(w[0]));
        }
    }
    if let Some(&v) = vertices.iter().find(|&&v| v as usize >= g.n()) {
        return Err(ModelError::OutOfRange(v));
    }
    let missing = missing_edges(g, &vertices);
    if missing > k {
        return Err(ModelError::NotKDefective { missing, k });
    }
    Ok(Solution {
        size: vertices.len(),
        nontrivial: vertices.len() >= k + 2,
        vertices,
        k,
    })
}

/// Where a vertex of the instance graph sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Committed to the k-defective set.
    P,
    /// Still a candidate for the k-defective set.
    R,
    /// `V \ (P ∪ R)`: may only join a solution as a clique vertex.
    Outside,
}

/// A general instance `(G, P, R)` with slack `r(P)` and weights
/// `w(u) = |P| - |N(u) ∩ P|` kept up to date as vertices move.
#[derive(Clone, Debug)]
pub struct Instance {
    graph: Graph,
    k: usize,
    role: Vec<Role>,
    p_list: Vec<Vertex>,
    p_len: usize,
    r_len: usize,
    // |N(u) ∩ P| and |N(u) ∩ R|
    p_adj: Vec<u32>,
    r_adj: Vec<u32>,
    slack: i64,
    // degeneracy order of `graph`, built on first use
    scan: OnceLock<Vec<Vertex>>,
}

impl Instance {
    pub fn new(graph: Graph, k: usize, p: &[Vertex], r: &[Vertex]) -> Result<Self, ModelError> {
        let n = graph.n();
        let mut inst = Instance {
            role: vec![Role::Outside; n],
            p_list: Vec::new(),
            p_adj: vec![0; n],
            r_adj: vec![0; n],
            p_len: 0,
            r_len: 0,
            slack: k as i64,
            k,
            graph,
            scan: OnceLock::new(),
        };
        for &v in r.iter().chain(p) {
            if v as usize >= n {
                return Err(ModelError::OutOfRange(v));
            }
            if inst.role[v as usize] != Role::Outside {
                return Err(ModelError::Duplicate(v));
            }
            inst.role[v as usize] = Role::R;
            inst.r_len += 1;
            for &u in inst.graph.neighbors(v) {
                inst.r_adj[u as usize] += 1;
            }
        }
        for &v in p {
            inst.include(v);
        }
        Ok(inst)
    }

    /// `(G, ∅, V)`.
    pub fn whole(graph: Graph, k: usize) -> Self {
        let all: Vec<Vertex> = graph.vertices().collect();
        Self::new(graph, k, &[], &all).expect("all vertices are valid and distinct")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Degeneracy order of the instance graph, computed once.
    pub fn degeneracy_scan(&self) -> &[Vertex] {
        self.scan
            .get_or_init(|| degeneracy_order(&self.graph).order().to_vec())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `r(P)`; negative once `P` is no longer k-defective.
    pub fn slack(&self) -> i64 {
        self.slack
    }

    #[inline]
    pub fn role(&self, v: Vertex) -> Role {
        self.role[v as usize]
    }

    pub fn p_len(&self) -> usize {
        self.p_len
    }

    pub fn r_len(&self) -> usize {
        self.r_len
    }

    #[inline]
    pub fn weight(&self, v: Vertex) -> usize {
        self.p_len - self.p_adj[v as usize] as usize
    }

    /// `|N(v) ∩ R|`
    #[inline]
    pub fn r_neighbors(&self, v: Vertex) -> usize {
        self.r_adj[v as usize] as usize
    }

    /// True when `v` is adjacent to every vertex of `P` other than itself.
    #[inline]
    pub fn sees_all_of_p(&self, v: Vertex) -> bool {
        let in_p = (self.role(v) == Role::P) as usize;
        self.p_adj[v as usize] as usize + in_p == self.p_len
    }

    /// True when `v` is adjacent to every other vertex of `P ∪ R`.
    pub fn sees_all_candidates(&self, v: Vertex) -> bool {
        let own = (self.role(v) != Role::Outside) as usize;
        self.p_adj[v as usize] as usize + self.r_adj[v as usize] as usize + own
            == self.p_len + self.r_len
    }

    /// Members of `P` in the order they were added.
    pub fn p_members(&self) -> &[Vertex] {
        &self.p_list
    }

    pub fn p(&self) -> Vec<Vertex> {
        self.with_role(Role::P)
    }

    pub fn r(&self) -> Vec<Vertex> {
        self.with_role(Role::R)
    }

    pub fn outside(&self) -> Vec<Vertex> {
        self.with_role(Role::Outside)
    }

    fn with_role(&self, role: Role) -> Vec<Vertex> {
        self.graph
            .vertices()
            .filter(|&v| self.role(v) == role)
            .collect()
    }

    /// Slack of `P ∪ {v}`.
    #[inline]
    pub fn slack_after_add(&self, v: Vertex) -> i64 {
        self.slack - self.weight(v) as i64
    }

    /// Moves `v` from `R` into `P`.
    pub fn include(&mut self, v: Vertex) {
        debug_assert_eq!(self.role(v), Role::R);
        self.slack = self.slack_after_add(v);
        self.role[v as usize] = Role::P;
        self.p_list.push(v);
        self.p_len += 1;
        self.r_len -= 1;
        for &u in self.graph.neighbors(v) {
            self.p_adj[u as usize] += 1;
            self.r_adj[u as usize] -= 1;
        }
    }

    /// Inverse of [`Instance::include`].
    pub fn uninclude(&mut self, v: Vertex) {
        debug_assert_eq!(self.role(v), Role::P);
        self.role[v as usize] = Role::R;
        let at = self.p_list.iter().rposition(|&u| u == v).unwrap();
        self.p_list.remove(at);
        self.p_len -= 1;
        self.r_len += 1;
        for &u in self.graph.neighbors(v) {
            self.p_adj[u as usize] -= 1;
            self.r_adj[u as usize] += 1;
        }
        self.slack += self.weight(v) as i64;
    }

    /// Moves `v` from `R` to `V \ (P ∪ R)`.
    pub fn exclude(&mut self, v: Vertex) {
        debug_assert_eq!(self.role(v), Role::R);
        self.role[v as usize] = Role::Outside;
        self.r_len -= 1;
        for &u in self.graph.neighbors(v) {
            self.r_adj[u as usize] -= 1;
        }
    }

    pub fn unexclude(&mut self, v: Vertex) {
        debug_assert_eq!(self.role(v), Role::Outside);
        self.role[v as usize] = Role::R;
        self.r_len += 1;
        for &u in self.graph.neighbors(v) {
            self.r_adj[u as usize] += 1;
        }
    }

    /// Vertices of `V \ P` that can still appear in a solution extending
    /// `P`: weight within the slack, and outside vertices only when they
    /// see all of `P`. Sorted by id.
    pub fn live_candidates(&self) -> Vec<Vertex> {
        self.graph.vertices().filter(|&v| self.is_live(v)).collect()
    }

    /// Membership flags of [`Instance::live_candidates`], indexed by vertex.
    pub fn live_mask(&self) -> Vec<bool> {
        self.graph.vertices().map(|v| self.is_live(v)).collect()
    }

    #[inline]
    pub fn is_live(&self, v: Vertex) -> bool {
        match self.role(v) {
            Role::P => false,
            Role::R => self.weight(v) as i64 <= self.slack.max(0),
            Role::Outside => self.weight(v) == 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, complete_minus, path};

    #[test]
    fn missing_edge_examples() {
        assert_eq!(missing_edges(&complete(4), &[0, 1, 2, 3]), 0);
        assert_eq!(missing_edges(&Graph::empty(3), &[0, 1, 2]), 3);
        assert_eq!(missing_edges(&path(3), &[0, 1, 2]), 1);
    }

    #[test]
    fn defective_clique_examples() {
        assert!(is_k_defective_clique(&complete(5), &[0, 1, 2, 3, 4], 0));
        let pair = Graph::empty(2);
        assert!(!is_k_defective_clique(&pair, &[0, 1], 0));
        assert!(is_k_defective_clique(&pair, &[0, 1], 1));
        let one_missing = complete_minus(4, &[(0, 1)]);
        assert!(is_k_defective_clique(&one_missing, &[0, 1, 2, 3], 1));
    }

    #[test]
    fn defective_set_examples() {
        let pair = Graph::empty(2);
        assert!(is_k_defective_set(&pair, &[0, 1], 1));
        assert!(!is_k_defective_set(&complete(3), &[0, 1, 2], 5));
        assert!(is_k_defective_set(&complete(3), &[], 0));
        // five isolated vertices miss 10 pairs; with k = 2 size 5 > 2k is impossible
        assert!(!is_k_defective_set(&Graph::empty(5), &[0, 1, 2, 3, 4], 2));
    }

    #[test]
    fn slack_after_add_examples() {
        let k4 = complete(4);
        let mut inst = Instance::new(k4, 2, &[0], &[1, 2, 3]).unwrap();
        assert_eq!(inst.slack_after_add(1), inst.slack());
        inst.include(1);
        assert_eq!(inst.slack(), 2);

        let inst = Instance::whole(Graph::empty(3), 3);
        assert_eq!(inst.slack_after_add(0), 3);

        // |P| = 3, v sees one of them, slack 5 -> 3
        let g = Graph::from_edges(4, [(3, 0), (0, 1), (1, 2), (0, 2)]);
        let inst = Instance::new(g, 5, &[0, 1, 2], &[3]).unwrap();
        assert_eq!(inst.slack(), 5);
        assert_eq!(inst.weight(3), 2);
        assert_eq!(inst.slack_after_add(3), 3);
    }

    #[test]
    fn check_solution_examples() {
        let s = check_solution(&complete(3), &[0, 1, 2], 0).unwrap();
        assert_eq!((s.size, s.nontrivial), (3, true));
        let s = check_solution(&Graph::empty(2), &[0, 1], 1).unwrap();
        assert_eq!((s.size, s.nontrivial), (2, false));
        let s = check_solution(&complete_minus(4, &[(0, 1)]), &[0, 1, 2, 3], 1).unwrap();
        assert_eq!((s.size, s.nontrivial), (4, true));
        assert_eq!(
            check_solution(&Graph::empty(3), &[0, 1, 2], 1),
            Err(ModelError::NotKDefective { missing: 3, k: 1 })
        );
        assert_eq!(
            check_solution(&complete(2), &[0, 5], 1),
            Err(ModelError::OutOfRange(5))
        );
    }

    #[test]
    fn solution_json_shape() {
        let s = check_solution(&complete(3), &[2, 0], 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["size"], 2);
        assert_eq!(v["vertices"], serde_json::json!([0, 2]));
        assert_eq!(v["nontrivial"], false);
        assert_eq!(v["k"], 1);
    }

    #[test]
    fn instance_rejects_overlap() {
        assert_eq!(
            Instance::new(complete(3), 1, &[0], &[0, 1]).unwrap_err(),
            ModelError::Duplicate(0)
        );
        assert_eq!(
            Instance::new(complete(3), 1, &[], &[7]).unwrap_err(),
            ModelError::OutOfRange(7)
        );
    }

    #[test]
    fn adjacency_to_candidates() {
        // 0 - 1 - 2, k large
        let inst = Instance::whole(path(3), 3);
        assert!(inst.sees_all_candidates(1));
        assert!(!inst.sees_all_candidates(0));
        let inst = Instance::new(path(3), 3, &[1], &[0, 2]).unwrap();
        assert!(inst.sees_all_candidates(1));
        assert!(inst.sees_all_of_p(0));
    }
}
