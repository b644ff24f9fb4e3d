//! Undirected simple graphs in compressed sparse row form, plus the
//! ordering and neighborhood operators used by the decomposition.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use thiserror::Error;

/// Vertex ids are dense in `[0, n)`.
pub type Vertex = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("input contains no edges")]
    Empty,
    #[error("too many distinct vertex labels for 32-bit ids")]
    TooManyVertices,
    #[error("common neighborhood requires a non-empty vertex set")]
    EmptySet,
}

/// Immutable simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    /// Builds a graph from an edge iterator. Self-loops are dropped and
    /// parallel edges collapse to one.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
        I::IntoIter: Clone,
    {
        let edges = edges.into_iter();
        let mut degree = vec![0usize; n];
        for (u, v) in edges.clone() {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "edge ({u},{v}) out of range for n={n}"
            );
            if u != v {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0 as Vertex; *offsets.last().unwrap()];
        for (u, v) in edges {
            if u != v {
                targets[fill[u as usize]] = v;
                fill[u as usize] += 1;
                targets[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }
        Self::compact(n, offsets, targets)
    }

    // Sorts and dedups each adjacency list in place, then squeezes out the gaps.
    fn compact(n: usize, offsets: Vec<usize>, mut targets: Vec<Vertex>) -> Self {
        let mut out_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0);
        let mut write = 0;
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            targets[lo..hi].sort_unstable();
            let mut last = None;
            for i in lo..hi {
                let t = targets[i];
                if last != Some(t) {
                    targets[write] = t;
                    write += 1;
                    last = Some(t);
                }
            }
            out_offsets.push(write);
        }
        targets.truncate(write);
        targets.shrink_to_fit();
        Graph {
            offsets: out_offsets,
            targets,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Adjacency test by binary search in the shorter list.
    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n() as Vertex
    }

    /// Each edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Canonical edge-list text: one `u v` line per edge, `u < v`, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.m() * 8);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// How to interpret the text handed to [`parse_graph`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FormatHint {
    /// Matrix Market when the first line carries the `%%MatrixMarket`
    /// banner, plain edge list otherwise.
    #[default]
    Auto,
    EdgeList,
    MatrixMarket,
}

/// A parsed graph together with the input label of every compacted id.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<u64>,
}

/// Parses whitespace-separated edge-list text.
///
/// Labels are compacted to `[0, n)` by order of first appearance. Lines
/// starting with `%` or `#` are comments; for Matrix Market input the
/// `rows cols nnz` size line after the banner is skipped. Tokens past the
/// second on a line (edge weights) are ignored.
pub fn parse_graph(bytes: &[u8], hint: FormatHint) -> Result<Graph, GraphError> {
    parse_labeled(bytes, hint).map(|l| l.graph)
}

pub fn parse_labeled(bytes: &[u8], hint: FormatHint) -> Result<LabeledGraph, GraphError> {
    let mut ids: HashMap<u64, Vertex> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut skip_size_line = hint == FormatHint::MatrixMarket;
    let mut seen_content = false;

    let mut intern = |label: u64| -> Result<Vertex, GraphError> {
        if let Some(&id) = ids.get(&label) {
            return Ok(id);
        }
        let id = Vertex::try_from(labels.len()).map_err(|_| GraphError::TooManyVertices)?;
        ids.insert(label, id);
        labels.push(label);
        Ok(id)
    };

    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let line = std::str::from_utf8(raw).map_err(|_| GraphError::Parse {
            line: line_no,
            msg: "invalid UTF-8".into(),
        })?;
        let line = line.trim();
        if !seen_content && line.starts_with("%%MatrixMarket") {
            if hint == FormatHint::Auto {
                skip_size_line = true;
            }
            seen_content = true;
            continue;
        }
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        seen_content = true;
        if skip_size_line {
            skip_size_line = false;
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next_label = |what: &str| -> Result<u64, GraphError> {
            let tok = tokens.next().ok_or_else(|| GraphError::Parse {
                line: line_no,
                msg: format!("missing {what} endpoint"),
            })?;
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: line_no,
                msg: format!("malformed vertex label {tok:?}"),
            })
        };
        let a = next_label("first")?;
        let b = next_label("second")?;
        let (u, v) = (intern(a)?, intern(b)?);
        edges.push((u, v));
    }

    if labels.is_empty() {
        return Err(GraphError::Empty);
    }
    let graph = Graph::from_edges(labels.len(), edges.iter().copied());
    Ok(LabeledGraph { graph, labels })
}

/// A vertex ordering with its inverse and the degeneracy it certifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrder {
    order: Vec<Vertex>,
    rank: Vec<u32>,
    residual: Vec<u32>,
    degeneracy: usize,
}

impl VertexOrder {
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    #[inline]
    pub fn rank(&self, v: Vertex) -> u32 {
        self.rank[v as usize]
    }

    pub fn degeneracy(&self) -> usize {
        self.degeneracy
    }

    /// Degree of `order[i]` in the graph left when it was peeled.
    pub fn residual_degree(&self, i: usize) -> usize {
        self.residual[i] as usize
    }

    /// Core number of every vertex, indexed by vertex id.
    pub fn core_numbers(&self) -> Vec<u32> {
        let mut core = vec![0; self.order.len()];
        let mut running = 0;
        for (i, &v) in self.order.iter().enumerate() {
            running = running.max(self.residual[i]);
            core[v as usize] = running;
        }
        core
    }
}

/// Min-degree peeling with smallest-id tie-breaking. `visit` receives each
/// vertex with its residual degree and may stop the peel early.
pub(crate) fn peel<F>(g: &Graph, mut visit: F)
where
    F: FnMut(Vertex, usize) -> ControlFlow<()>,
{
    let n = g.n();
    if n == 0 {
        return;
    }
    let mut deg: Vec<u32> = g.vertices().map(|v| g.degree(v) as u32).collect();
    let mut heap: BinaryHeap<Reverse<(u32, Vertex)>> = BinaryHeap::with_capacity(n + g.m());
    heap.extend(g.vertices().map(|v| Reverse((deg[v as usize], v))));
    let mut removed = vec![false; n];
    while let Some(Reverse((d, v))) = heap.pop() {
        // stale entries: already peeled, or degree dropped since the push
        if removed[v as usize] || deg[v as usize] != d {
            continue;
        }
        removed[v as usize] = true;
        if visit(v, d as usize).is_break() {
            return;
        }
        for &u in g.neighbors(v) {
            if !removed[u as usize] {
                deg[u as usize] -= 1;
                heap.push(Reverse((deg[u as usize], u)));
            }
        }
    }
}

/// Degeneracy ordering by repeated removal of a minimum-degree vertex.
pub fn degeneracy_order(g: &Graph) -> VertexOrder {
    let n = g.n();
    let mut order = Vec::with_capacity(n);
    let mut residual = Vec::with_capacity(n);
    peel(g, |v, d| {
        order.push(v);
        residual.push(d as u32);
        ControlFlow::Continue(())
    });
    let mut rank = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i as u32;
    }
    let degeneracy = residual.iter().copied().max().unwrap_or(0) as usize;
    VertexOrder {
        order,
        rank,
        residual,
        degeneracy,
    }
}

/// `N⁺(v)`: neighbors of `v` ranked after it.
pub fn neighbors_after(g: &Graph, ord: &VertexOrder, v: Vertex) -> Vec<Vertex> {
    let rv = ord.rank(v);
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&u| ord.rank(u) > rv)
        .collect()
}

/// `N²⁺(v)`: later-ranked vertices outside `N⁺(v) ∪ {v}` with a neighbor
/// in `N⁺(v)`. Sorted by id.
pub fn two_hop_after(g: &Graph, ord: &VertexOrder, v: Vertex) -> Vec<Vertex> {
    let rv = ord.rank(v);
    let direct = neighbors_after(g, ord, v);
    let mut out: Vec<Vertex> = direct
        .iter()
        .flat_map(|&u| g.neighbors(u).iter().copied())
        .filter(|&w| w != v && ord.rank(w) > rv)
        .collect();
    out.sort_unstable();
    out.dedup();
    out.retain(|w| direct.binary_search(w).is_err());
    out
}

/// An induced subgraph with the map back to the parent's ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphMap {
    pub graph: Graph,
    pub to_global: Vec<Vertex>,
}

/// `G[S]`. Local id `i` corresponds to `s[i]`; `s` must not repeat a vertex.
pub fn induced_subgraph(g: &Graph, s: &[Vertex]) -> SubgraphMap {
    let mut index: Vec<(Vertex, Vertex)> = s
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as Vertex))
        .collect();
    index.sort_unstable();
    debug_assert!(
        index.windows(2).all(|w| w[0].0 != w[1].0),
        "duplicate vertex in subset"
    );

    let mut offsets = Vec::with_capacity(s.len() + 1);
    offsets.push(0);
    let mut targets: Vec<Vertex> = Vec::with_capacity(4 * s.len());
    for &v in s {
        let start = targets.len();
        let nbrs = g.neighbors(v);
        if nbrs.len() > index.len() {
            for &(w, id) in &index {
                if nbrs.binary_search(&w).is_ok() {
                    targets.push(id);
                }
            }
        } else {
            // merge walk over two sorted sequences
            let mut j = 0;
            for &w in nbrs {
                while j < index.len() && index[j].0 < w {
                    j += 1;
                }
                if j == index.len() {
                    break;
                }
                if index[j].0 == w {
                    targets.push(index[j].1);
                }
            }
        }
        targets[start..].sort_unstable();
        offsets.push(targets.len());
    }
    SubgraphMap {
        graph: Graph { offsets, targets },
        to_global: s.to_vec(),
    }
}

/// `CN(S)`: vertices adjacent to every member of `s`, sorted by id.
pub fn common_neighbors(g: &Graph, s: &[Vertex]) -> Result<Vec<Vertex>, GraphError> {
    let pivot = *s
        .iter()
        .min_by_key(|&&v| (g.degree(v), v))
        .ok_or(GraphError::EmptySet)?;
    Ok(g.neighbors(pivot)
        .iter()
        .copied()
        .filter(|&w| s.iter().all(|&u| u == pivot || g.has_edge(u, w)))
        .collect())
}
