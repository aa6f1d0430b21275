//! Memory-access abstractions for describing an accelerator as request
//! streams, and an engine that ticks such a description against the DRAM
//! model.
//!
//! An accelerator model builds a [`FlowGraph`] of producers, queues, filters,
//! cache-line buffers and mergers that ends in one root node. Each
//! accelerator cycle the [`Engine`] lets the [`Workload`] react, then drains
//! the root into DRAM until the memory controller pushes back. Completed
//! requests hand their [`Callback`]s back to the workload with no delay.

mod engine;
mod graph;
mod request;

pub use engine::{channel_address, Engine, EngineConfig, FlowError, PhaseCycles, SimResult, Workload, CHANNEL_SHIFT};
pub use graph::{FlowCounters, FlowGraph, MergePolicy, NodeId, ProducerSpec};
pub use request::{push_callback, Callback, Callbacks, Request};

pub use gpasim_dram::ReqKind;
