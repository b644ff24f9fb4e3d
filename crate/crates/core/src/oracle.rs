//! Exhaustive reference answers for small inputs.

use thiserror::Error;

use crate::bounds::Partition;
use crate::graph::{Graph, Vertex};
use crate::model::{check_solution, is_k_defective_set, pairs, Instance, Role, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest graph for subset search.
    pub max_n: usize,
    /// Largest element count for OPT and set enumeration.
    pub max_elements: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_n: 14,
            max_elements: 16,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} has {size} elements, oracle limit is {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
}

fn check_limit(what: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
    // masks are u64
    let limit = limit.min(63);
    if size > limit {
        return Err(OracleError::TooLarge { what, size, limit });
    }
    Ok(())
}

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    g.vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect()
}

fn mask_to_vec(mask: u64) -> Vec<Vertex> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Maximum k-defective clique by depth-first extension in id order,
/// abandoning any set that already misses more than `k` edges.
pub fn brute_max_kdc(g: &Graph, k: usize) -> Result<Solution, OracleError> {
    brute_max_kdc_with(g, k, &OracleLimits::default())
}

pub fn brute_max_kdc_with(
    g: &Graph,
    k: usize,
    limits: &OracleLimits,
) -> Result<Solution, OracleError> {
    check_limit("graph", g.n(), limits.max_n)?;
    let adj = adjacency_masks(g);
    let mut best = 0u64;
    fn grow(adj: &[u64], k: usize, from: usize, set: u64, missing: usize, best: &mut u64) {
        if set.count_ones() > best.count_ones() {
            *best = set;
        }
        for v in from..adj.len() {
            let cost = (set & !adj[v]).count_ones() as usize;
            if missing + cost <= k {
                grow(adj, k, v + 1, set | 1 << v, missing + cost, best);
            }
        }
    }
    grow(&adj, k, 0, 0, 0, &mut best);
    Ok(check_solution(g, &mask_to_vec(best), k).expect("search keeps sets k-defective"))
}

/// Same answer as [`brute_max_kdc`] by testing every subset.
pub fn brute_max_kdc_masks(g: &Graph, k: usize) -> Result<usize, OracleError> {
    check_limit("graph", g.n(), 20)?;
    let adj = adjacency_masks(g);
    let mut best = 0;
    for set in 0u64..1 << g.n() {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        let present: usize = mask_to_vec(set)
            .iter()
            .map(|&v| (adj[v as usize] & set).count_ones() as usize)
            .sum::<usize>()
            / 2;
        if pairs(size) - present <= k {
            best = size;
        }
    }
    Ok(best)
}

/// Largest k-defective clique `Q` of the instance graph with `P ⊆ Q`, in
/// which every member outside `P ∪ R` is adjacent to all other members.
/// With `pair`, both vertices must be in `Q`. `None` if no such `Q`.
pub fn brute_instance_opt(
    inst: &Instance,
    pair: Option<(Vertex, Vertex)>,
    limits: &OracleLimits,
) -> Result<Option<usize>, OracleError> {
    let g = inst.graph();
    check_limit("instance graph", g.n(), limits.max_n)?;
    let adj = adjacency_masks(g);
    let p_mask = inst.p_members().iter().fold(0u64, |m, &v| m | 1 << v);
    let need = pair.map_or(0, |(u, v)| 1u64 << u | 1u64 << v);
    let outside = g
        .vertices()
        .filter(|&v| inst.role(v) == Role::Outside)
        .fold(0u64, |m, v| m | 1 << v);
    let rest: Vec<usize> = g
        .vertices()
        .filter(|&v| inst.role(v) != Role::P)
        .map(|v| v as usize)
        .collect();
    let base_missing = pairs(inst.p_len())
        - inst
            .p_members()
            .iter()
            .map(|&v| (adj[v as usize] & p_mask).count_ones() as usize)
            .sum::<usize>()
            / 2;
    if base_missing > inst.k() {
        return Ok(None);
    }

    let mut best: Option<usize> = None;
    #[allow(clippy::too_many_arguments)]
    fn grow(
        adj: &[u64],
        rest: &[usize],
        outside: u64,
        need: u64,
        k: usize,
        from: usize,
        set: u64,
        missing: usize,
        best: &mut Option<usize>,
    ) {
        if set & need == need {
            let size = set.count_ones() as usize;
            if best.is_none_or(|b| size > b) {
                *best = Some(size);
            }
        }
        for (i, &v) in rest.iter().enumerate().skip(from) {
            let misses = set & !adj[v];
            let cost = misses.count_ones() as usize;
            if missing + cost > k {
                continue;
            }
            // outside vertices must see every member, and nobody may miss one
            if outside >> v & 1 == 1 && misses != 0 {
                continue;
            }
            if misses & outside != 0 {
                continue;
            }
            grow(
                adj,
                rest,
                outside,
                need,
                k,
                i + 1,
                set | 1 << v,
                missing + cost,
                best,
            );
        }
    }
    grow(
        &adj,
        &rest,
        outside,
        need,
        inst.k(),
        0,
        p_mask,
        base_missing,
        &mut best,
    );
    Ok(best)
}

/// Exhaustive optimum of the packing-and-coloring program over the
/// partition: pick `S_i ⊆ Π_i` maximizing `|P| + Σ|S_i|` subject to
/// `Σ C(|S_i|, 2) + Σ w ≤ r(P)` and, when `conflict` is given, no
/// conflicting pair inside any `S_i`.
pub fn brute_opt(
    inst: &Instance,
    part: &Partition,
    conflict: Option<&mut dyn FnMut(Vertex, Vertex) -> bool>,
    limits: &OracleLimits,
) -> Result<usize, OracleError> {
    let elements: Vec<(usize, Vertex)> = part
        .classes()
        .iter()
        .enumerate()
        .flat_map(|(c, class)| class.iter().map(move |&v| (c, v)))
        .collect();
    check_limit("partition", elements.len(), limits.max_elements)?;
    if inst.slack() < 0 {
        return Ok(inst.p_len());
    }
    let slack = inst.slack() as usize;
    let m = elements.len();
    // same-class conflicts as bit masks
    let mut clash = vec![0u64; m];
    if let Some(conflict) = conflict {
        for a in 0..m {
            for b in a + 1..m {
                if elements[a].0 == elements[b].0 && conflict(elements[a].1, elements[b].1) {
                    clash[a] |= 1 << b;
                    clash[b] |= 1 << a;
                }
            }
        }
    }
    let chi = part.chi();
    let mut best = 0;
    let mut per_class = vec![0usize; chi];
    for set in 0u64..1 << m {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        per_class.iter_mut().for_each(|c| *c = 0);
        let mut cost = 0;
        let mut ok = true;
        for (i, &(c, v)) in elements.iter().enumerate() {
            if set >> i & 1 == 1 {
                if clash[i] & set != 0 {
                    ok = false;
                    break;
                }
                per_class[c] += 1;
                cost += inst.weight(v);
            }
        }
        cost += per_class.iter().map(|&s| pairs(s)).sum::<usize>();
        if ok && cost <= slack {
            best = size;
        }
    }
    Ok(inst.p_len() + best)
}

/// Every k-defective set `D` with `p ⊆ D ⊆ p ∪ r`, each sorted, in
/// increasing subset-mask order over `r`.
pub fn enumerate_kdef_sets(
    g: &Graph,
    k: usize,
    p: &[Vertex],
    r: &[Vertex],
) -> Result<Vec<Vec<Vertex>>, OracleError> {
    check_limit(
        "p ∪ r",
        p.len() + r.len(),
        OracleLimits::default().max_elements,
    )?;
    let mut out = Vec::new();
    for set in 0u64..1 << r.len() {
        let mut d: Vec<Vertex> = p.to_vec();
        d.extend((0..r.len()).filter(|&i| set >> i & 1 == 1).map(|i| r[i]));
        d.sort_unstable();
        if is_k_defective_set(g, &d, k) {
            out.push(d);
        }
    }
    Ok(out)
}
