//! A cycle-level DRAM timing model for DDR3 and DDR4.
//!
//! Requests go in through [`DramSim::enqueue`], the model is advanced one
//! memory-clock cycle per [`DramSim::tick`], and completed request ids come
//! back out. No data is stored; only the command timing of every request is
//! simulated (bank activation, precharge, column access, refresh, bus
//! turnarounds).

mod config;
mod controller;
mod mapping;
mod sim;
mod stats;
mod tables;

pub use config::{AddressField, AddressScheme, DramConfig, SchedulerKind, Standard};
pub use mapping::{AddressMapper, DramCoord};
pub use sim::{Completion, DramSim, Enqueue, MemRequest, ReqKind};
pub use stats::DramStats;
pub use tables::{DramTimings, Organization};

/// Bytes returned by one burst (one cache line).
pub const LINE_BYTES: u64 = 64;

#[derive(Debug, thiserror::Error)]
pub enum DramError {
    #[error("unknown {standard} speed grade {token:?}")]
    UnknownSpeed { standard: Standard, token: String },
    #[error("unknown {standard} organization {token:?}")]
    UnknownOrganization { standard: Standard, token: String },
    #[error("invalid address scheme {0:?}")]
    BadScheme(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("address {address:#x} beyond capacity {capacity:#x}")]
    AddressOutOfRange { address: u64, capacity: u64 },
}

pub type Result<T, E = DramError> = std::result::Result<T, E>;
