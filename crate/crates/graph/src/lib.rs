//! Graph datasets in the two layouts used by graph-processing accelerators
//! (horizontally partitioned edge lists and partitioned inverted CSR),
//! plus functional reference solvers for BFS, SSSP, WCC, SpMV and PageRank.
//!
//! Everything in this crate is a pure function over an immutable [`Graph`];
//! the timing models live in `gpasim-accel`.

mod error;
mod graph;
mod load;
mod partition;
mod problem;
mod reference;
mod roots;
mod stats;

#[cfg(feature = "fixtures")]
pub mod fixtures;

pub use error::GraphError;
pub use graph::{Edge, Graph, VertexId};
pub use load::{load_binary, load_snap_edge_list, save_binary, LoadOptions, BINARY_MAGIC};
pub use partition::{
    build_partitioned_csr, partition_count, partition_edge_list, sort_partition_edges_by_destination, CsrPartition,
    CsrPartitions, EdgeListPartitions, Interval,
};
pub use problem::{PrFormula, Problem, ProblemSpec, Values};
pub use reference::{reference_solve, Solution, SolveMode};
pub use roots::{pick_roots, Mt19937, PAPER_ROOT_SEED};
pub use stats::{graph_stats, GraphStats};

pub type Result<T, E = GraphError> = std::result::Result<T, E>;
