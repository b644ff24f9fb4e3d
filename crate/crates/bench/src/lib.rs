//! Seeded workloads shared by the criterion benches.

use kdefect::generators::gnp;
use kdefect::{random_instance, Graph, Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Path of the shipped manifest listing the reference rows.
pub const TABLE_MANIFEST: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/table.manifest");

/// `count` random search instances on 20 to 40 vertices with `k ≤ 6`.
pub fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_instance(&mut rng, (20, 40), 6))
        .collect()
}

/// `G(n, p)` from a fixed seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    gnp(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}
