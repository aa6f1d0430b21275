use std::collections::BTreeMap;

use gpasim_dram::{AddressMapper, DramError, DramSim, DramStats, Enqueue, MemRequest};
use serde::Serialize;

use crate::graph::{FlowCounters, FlowGraph};
use crate::request::{Callback, Callbacks, Request};

/// The accelerator side of a simulation.
pub trait Workload {
    /// Runs once per accelerator cycle, before the root is drained.
    fn tick(&mut self, flow: &mut FlowGraph, now: u64);

    /// A request carrying `cb` has completed, or was filtered out.
    fn on_complete(&mut self, cb: Callback, flow: &mut FlowGraph, now: u64);

    fn is_done(&self) -> bool;

    fn iterations(&self) -> u32 {
        1
    }

    fn phases(&self) -> Vec<PhaseCycles> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseCycles {
    pub name: String,
    pub cycles: u64,
}

impl PhaseCycles {
    pub fn new(name: impl Into<String>, cycles: u64) -> Self {
        PhaseCycles {
            name: name.into(),
            cycles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub accel_mhz: u32,
    /// Accelerator cycles without any request moving before giving up.
    pub deadlock_ticks: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            accel_mhz: 200,
            deadlock_ticks: 10_000_000,
        }
    }
}

impl EngineConfig {
    pub fn new(accel_mhz: u32) -> Self {
        EngineConfig {
            accel_mhz,
            ..Self::default()
        }
    }

    pub fn mem_ticks_per_accel_tick(&self, mem_mhz: u32) -> f64 {
        mem_mhz as f64 / self.accel_mhz as f64
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FlowError {
    #[error("no request moved for {idle} accelerator cycles (at cycle {cycle}); pending nodes:\n{report}")]
    Deadlock { cycle: u64, idle: u64, report: String },
    #[error("clock frequencies must be positive")]
    BadClock,
    #[error("flow graph has no root node")]
    NoRoot,
    #[error(transparent)]
    Dram(#[from] DramError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub accel_cycles: u64,
    pub mem_cycles: u64,
    pub accel_mhz: u32,
    pub runtime_s: f64,
    pub iterations: u32,
    pub phases: Vec<PhaseCycles>,
    pub dram: DramStats,
    pub flow: FlowCounters,
    /// Cache lines sent to memory, keyed by the label of the originating node.
    pub requests: BTreeMap<String, u64>,
}

/// Bit position of the channel number in channel-local addresses.
pub const CHANNEL_SHIFT: u32 = 48;

/// Address of byte `offset` in `channel`'s private address space, for
/// engines built with [`Engine::with_channel_local_addresses`].
pub fn channel_address(channel: u32, offset: u64) -> u64 {
    debug_assert!(offset < 1 << CHANNEL_SHIFT);
    (channel as u64) << CHANNEL_SHIFT | offset
}

/// Ticks a flow graph and a DRAM model in their two clock domains.
#[derive(Debug)]
pub struct Engine {
    config: EngineConfig,
    dram: DramSim,
    flow: FlowGraph,
    inflight: Vec<Callbacks>,
    free: Vec<u64>,
    local: Option<AddressMapper>,
}

impl Engine {
    pub fn new(config: EngineConfig, dram: DramSim, flow: FlowGraph) -> Result<Self, FlowError> {
        if config.accel_mhz == 0 || dram.clock_mhz() == 0 {
            return Err(FlowError::BadClock);
        }
        if flow.root().is_none() {
            return Err(FlowError::NoRoot);
        }
        Ok(Engine {
            config,
            dram,
            flow,
            inflight: Vec::new(),
            free: Vec::new(),
            local: None,
        })
    }

    /// Interprets request addresses as [`channel_address`] values, so each
    /// channel can be laid out as one contiguous space.
    pub fn with_channel_local_addresses(mut self) -> Self {
        self.local = Some(self.dram.mapper().clone());
        self
    }

    pub fn dram(&self) -> &DramSim {
        &self.dram
    }

    pub fn flow(&self) -> &FlowGraph {
        &self.flow
    }

    pub fn mem_ticks_per_accel_tick(&self) -> f64 {
        self.config.mem_ticks_per_accel_tick(self.dram.clock_mhz())
    }

    // Moves requests from the root into DRAM until something refuses.
    fn drain_root(&mut self) -> Result<bool, FlowError> {
        let root = self.flow.root().expect("checked in new");
        let mut moved = false;
        loop {
            let dram = &self.dram;
            let local = &self.local;
            let accept = |r: &Request| dram.can_accept(translate(local, r.addr), r.kind);
            if !self.flow.ready(root, &accept) || !accept(self.flow.head(root)) {
                return Ok(moved);
            }
            let r = self.flow.pop_root();
            debug_assert_eq!(r.line(), r.last_line(), "request crosses a cache line");
            let id = match self.free.pop() {
                Some(id) => {
                    self.inflight[id as usize] = r.callbacks;
                    id
                }
                None => {
                    self.inflight.push(r.callbacks);
                    self.inflight.len() as u64 - 1
                }
            };
            let addr = translate(&self.local, r.addr);
            let outcome = self.dram.enqueue(MemRequest { id, addr, kind: r.kind })?;
            debug_assert_eq!(outcome, Enqueue::Accepted);
            moved = true;
        }
    }

    /// Runs until the workload is done and every request has completed.
    pub fn run<W: Workload + ?Sized>(mut self, workload: &mut W) -> Result<SimResult, FlowError> {
        let fa = self.config.accel_mhz as u64;
        let fm = self.dram.clock_mhz() as u64;
        let mut accel = 0u64;
        let mut mem = 0u64;
        let mut idle = 0u64;
        let mut progress = false;
        let mut done = Vec::new();
        loop {
            // accelerator first when both domains tick at the same instant
            if accel * fm <= mem * fa {
                if workload.is_done() && self.dram.is_idle() && self.flow.is_idle() {
                    break;
                }
                self.flow.begin_tick(accel);
                workload.tick(&mut self.flow, accel);
                progress |= self.drain_root()?;
                while self.flow.has_instant() {
                    progress = true;
                    for cb in self.flow.take_instant() {
                        workload.on_complete(cb, &mut self.flow, accel);
                    }
                    self.drain_root()?;
                }
                if progress {
                    idle = 0;
                    progress = false;
                } else {
                    idle += 1;
                    if idle > self.config.deadlock_ticks {
                        return Err(FlowError::Deadlock {
                            cycle: accel,
                            idle,
                            report: self.flow.pending_report(),
                        });
                    }
                }
                accel += 1;
            } else {
                self.dram.tick_into(&mut done);
                mem += 1;
                for c in done.drain(..) {
                    progress = true;
                    let cbs = std::mem::take(&mut self.inflight[c.id as usize]);
                    self.free.push(c.id);
                    for cb in cbs {
                        workload.on_complete(cb, &mut self.flow, accel);
                    }
                }
            }
        }
        self.dram.flush_trace();
        // the check at cycle `accel` observed a state reached during the previous one
        let accel_cycles = accel.saturating_sub(1);
        let mut requests = BTreeMap::new();
        for (label, n) in self.flow.served_by_source() {
            *requests.entry(label.to_string()).or_insert(0) += n;
        }
        Ok(SimResult {
            accel_cycles,
            mem_cycles: mem,
            accel_mhz: self.config.accel_mhz,
            runtime_s: accel_cycles as f64 / (self.config.accel_mhz as f64 * 1e6),
            iterations: workload.iterations(),
            phases: workload.phases(),
            dram: self.dram.stats(),
            flow: self.flow.counters(),
            requests,
        })
    }
}

fn translate(local: &Option<AddressMapper>, addr: u64) -> u64 {
    match local {
        Some(m) => m.channel_local((addr >> CHANNEL_SHIFT) as u32, addr & ((1 << CHANNEL_SHIFT) - 1)),
        None => addr,
    }
}
