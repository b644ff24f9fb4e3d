//! Small deterministic graph families and a seeded G(n, p) sampler.

use rand::Rng;

use crate::graph::{Graph, Vertex};

pub fn complete(n: usize) -> Graph {
    let n32 = n as Vertex;
    let edges: Vec<_> = (0..n32)
        .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
        .collect();
    Graph::from_edges(n, edges)
}

/// `0 - 1 - ... - (n-1)`
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n as Vertex).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, edges)
}

pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n as Vertex).map(|v| (v - 1, v)).collect();
    if n > 2 {
        edges.push((n as Vertex - 1, 0));
    }
    Graph::from_edges(n, edges)
}

/// Center `0` joined to leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves as Vertex).map(|v| (0, v)).collect();
    Graph::from_edges(leaves + 1, edges)
}

/// `complete(n)` with the listed edges removed.
pub fn complete_minus(n: usize, missing: &[(Vertex, Vertex)]) -> Graph {
    let gone = |u: Vertex, v: Vertex| {
        missing
            .iter()
            .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    };
    let n32 = n as Vertex;
    let edges: Vec<_> = (0..n32)
        .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
        .filter(|&(u, v)| !gone(u, v))
        .collect();
    Graph::from_edges(n, edges)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}
