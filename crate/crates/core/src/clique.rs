//! Maximum clique: a coloring-bounded branch and bound over bitsets, and a
//! plain enumerator used to check it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{degeneracy_order, Graph, Vertex};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueResult {
    pub vertices: Vec<Vertex>,
    pub size: usize,
}

impl CliqueResult {
    fn from_vertices(mut vertices: Vec<Vertex>) -> Self {
        vertices.sort_unstable();
        CliqueResult {
            size: vertices.len(),
            vertices,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliqueError {
    #[error("brute-force clique search is limited to {limit} vertices, got {n}")]
    TooLarge { n: usize, limit: usize },
}

pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Exact maximum clique of `g` whenever it is larger than `floor`;
/// otherwise some clique of size at most `floor`, possibly empty.
pub fn max_clique(g: &Graph, floor: usize) -> CliqueResult {
    if g.n() == 0 {
        return CliqueResult::default();
    }
    // A clique of size floor + 1 lives in the floor-core. Candidates are
    // laid out in reverse peel order, densest core first.
    let ord = degeneracy_order(g);
    if ord.degeneracy() < floor {
        return CliqueResult::default();
    }
    let core = ord.core_numbers();
    let keep: Vec<Vertex> = ord
        .order()
        .iter()
        .rev()
        .copied()
        .filter(|&v| core[v as usize] as usize >= floor)
        .collect();
    if keep.is_empty() {
        return CliqueResult::default();
    }
    let mut search = BitSearch::new(g, &keep);
    let mut candidates = Bits::full(keep.len());
    let mut current = Vec::new();
    search.best_len = floor;
    search.expand(&mut candidates, &mut current);
    CliqueResult::from_vertices(search.best.iter().map(|&i| keep[i]).collect())
}

#[derive(Clone)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn empty(n: usize) -> Self {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn intersect(&self, other: &Bits) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn subtract_in_place(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }
}

struct BitSearch {
    adj: Vec<Bits>,
    best: Vec<usize>,
    best_len: usize,
}

impl BitSearch {
    fn new(g: &Graph, keep: &[Vertex]) -> Self {
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in keep.iter().enumerate() {
            local[v as usize] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                let mut b = Bits::empty(keep.len());
                for &u in g.neighbors(v) {
                    if local[u as usize] != usize::MAX {
                        b.set(local[u as usize]);
                    }
                }
                b
            })
            .collect();
        BitSearch {
            adj,
            best: Vec::new(),
            best_len: 0,
        }
    }

    // Greedy sequential coloring of the candidates in index order; returns
    // vertices with their color, colors non-decreasing.
    fn color_sort(&self, candidates: &Bits) -> Vec<(usize, usize)> {
        let mut uncolored = candidates.clone();
        let mut out = Vec::new();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut avail = uncolored.clone();
            while let Some(v) = avail.first() {
                avail.clear(v);
                uncolored.clear(v);
                avail.subtract_in_place(&self.adj[v]);
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, candidates: &mut Bits, current: &mut Vec<usize>) {
        let colored = self.color_sort(candidates);
        for &(v, color) in colored.iter().rev() {
            if current.len() + color <= self.best_len {
                return;
            }
            current.push(v);
            let mut next = candidates.intersect(&self.adj[v]);
            if next.is_empty() {
                if current.len() > self.best_len {
                    self.best_len = current.len();
                    self.best = current.clone();
                }
            } else {
                self.expand(&mut next, current);
            }
            current.pop();
            candidates.clear(v);
        }
    }
}

/// Exact maximum clique by enumerating every clique. Only for small graphs.
pub fn brute_force_max_clique(g: &Graph) -> Result<CliqueResult, CliqueError> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(CliqueError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adj: Vec<u32> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut best = 0u32;
    fn grow(adj: &[u32], from: usize, members: u32, common: u32, best: &mut u32) {
        if members.count_ones() > best.count_ones() {
            *best = members;
        }
        for v in from..adj.len() {
            if common >> v & 1 == 1 {
                grow(adj, v + 1, members | 1 << v, common & adj[v], best);
            }
        }
    }
    let everyone = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    grow(&adj, 0, 0, everyone, &mut best);
    Ok(CliqueResult::from_vertices(
        (0..n as Vertex).filter(|&v| best >> v & 1 == 1).collect(),
    ))
}
