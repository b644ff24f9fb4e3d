//! Exact maximum k-defective clique search.
//!
//! The solver decomposes the input along a degeneracy ordering into
//! two-hop subinstances, enumerates k-defective sets inside each one, and
//! completes every set with a maximum clique of its common neighborhood.
//! Branches are cut with one of several upper bounds, the tightest of
//! which reasons about pairs of vertices that cannot appear together in a
//! solution larger than the incumbent.

pub mod bounds;
pub mod branch;
pub mod clique;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod solver;

pub use bounds::{
    build_conflicts, club_bound, coloring_bound, coloring_cap, conflict_layers, conflict_rule,
    dp_bound, dp_tables, evaluate, evaluate_with_partition, greedy_partition, pack_color_conf,
    packing_bound, pcc_tables, pcc_tables_with, sorting_bound, BoundKind, ConflictOracle,
    ConflictRule, DpTables, Partition,
};
pub use branch::{
    select_branch_vertex, Brancher, Event, SearchObserver, SearchStats, Silent, Trace,
};
pub use clique::{brute_force_max_clique, max_clique, CliqueResult};
pub use graph::{
    common_neighbors, degeneracy_order, induced_subgraph, neighbors_after, parse_graph,
    parse_labeled, two_hop_after, FormatHint, Graph, GraphError, LabeledGraph, SubgraphMap, Vertex,
    VertexOrder,
};
pub use harness::{
    dominance_suite, parse_manifest, random_case, random_instance, resolve_dataset, BenchRow,
    BoundValues, DominanceReport, ManifestError, ManifestRow, Opt, Relation, RunStatus,
    SolveSummary, SuiteCase,
};
pub use model::{
    check_solution, is_k_defective_clique, is_k_defective_set, missing_edges, Instance, ModelError,
    Role, Solution,
};
pub use oracle::{
    brute_instance_opt, brute_max_kdc, brute_max_kdc_masks, brute_max_kdc_with, brute_opt,
    enumerate_kdef_sets, OracleError, OracleLimits,
};
pub use solver::{
    build_subinstances, heuristic_initial, solve, Incumbent, SolveOptions, SolveReport,
    Subinstance, DEFAULT_TIME_LIMIT_SECS,
};
