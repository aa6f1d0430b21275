//! Request-flow models of two FPGA graph accelerators: HitGraph
//! (edge-centric scatter/gather over horizontally partitioned edge lists)
//! and AccuGraph (vertex-centric pull over partitioned inverted CSR).
//!
//! Both models compute the problem functionally while generating the
//! accelerator's memory requests; the request stream is timed by
//! `gpasim-dram` through a `gpasim-flow` engine.

mod accugraph;
mod common;
mod hitgraph;

pub use accugraph::{
    bram_bank_delay, prepare_csr, run_accugraph, skip_decisions, AccuGraphParams, BramBanks, SkipDecision,
};
pub use common::{AccelError, ModelStats, RunOutput};
pub use hitgraph::{prepare_edge_lists, run_hitgraph, HitGraphParams};
