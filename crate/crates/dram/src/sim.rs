use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::config::DramConfig;
use crate::controller::{Channel, Entry};
use crate::mapping::{AddressMapper, DramCoord};
use crate::stats::DramStats;
use crate::tables::{self, DramTimings, Organization};
use crate::{DramError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ReqKind {
    Read,
    Write,
}

impl fmt::Display for ReqKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReqKind::Read => "R",
            ReqKind::Write => "W",
        })
    }
}

/// One cache-line request. `id` is returned untouched on completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemRequest {
    pub id: u64,
    pub addr: u64,
    pub kind: ReqKind,
}

impl MemRequest {
    pub fn read(id: u64, addr: u64) -> Self {
        MemRequest {
            id,
            addr,
            kind: ReqKind::Read,
        }
    }

    pub fn write(id: u64, addr: u64) -> Self {
        MemRequest {
            id,
            addr,
            kind: ReqKind::Write,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enqueue {
    Accepted,
    /// The target channel's queue is full; retry on a later cycle.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Completion {
    pub id: u64,
    pub addr: u64,
    pub kind: ReqKind,
    pub coord: DramCoord,
    pub arrival: u64,
    pub finished: u64,
}

impl Completion {
    pub fn latency(&self) -> u64 {
        self.finished - self.arrival
    }
}

pub struct DramSim {
    config: DramConfig,
    timings: DramTimings,
    org: Organization,
    mapper: AddressMapper,
    channels: Vec<Channel>,
    clk: u64,
    trace: Option<Box<dyn Write + Send>>,
}

impl fmt::Debug for DramSim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DramSim")
            .field("config", &self.config)
            .field("clk", &self.clk)
            .field("pending", &self.pending())
            .finish_non_exhaustive()
    }
}

impl DramSim {
    pub fn new(config: DramConfig) -> Result<Self> {
        if config.queue_depth == 0 {
            return Err(DramError::BadConfig("queue depth must be positive".into()));
        }
        let org = tables::organization(config.standard, &config.organization)?;
        let timings = tables::timings(config.standard, &config.speed, &org)?;
        let mapper = AddressMapper::new(&config.scheme, &org, config.channels, config.ranks)?;
        let channels = (0..config.channels)
            .map(|_| {
                Channel::new(
                    timings,
                    config.ranks as usize,
                    org.bank_groups as usize,
                    org.banks_per_group as usize,
                    config.scheduler,
                    config.queue_depth,
                    config.refresh,
                )
            })
            .collect();
        Ok(DramSim {
            config,
            timings,
            org,
            mapper,
            channels,
            clk: 0,
            trace: None,
        })
    }

    pub fn config(&self) -> &DramConfig {
        &self.config
    }

    pub fn timings(&self) -> &DramTimings {
        &self.timings
    }

    pub fn organization(&self) -> &Organization {
        &self.org
    }

    pub fn mapper(&self) -> &AddressMapper {
        &self.mapper
    }

    pub fn clock_mhz(&self) -> u32 {
        self.timings.clock_mhz
    }

    /// Current memory cycle; the next [`tick`](Self::tick) simulates it.
    pub fn clk(&self) -> u64 {
        self.clk
    }

    /// Writes one line per completed request:
    /// `tick type address channel rank bank row column latency`.
    pub fn set_trace(&mut self, sink: Box<dyn Write + Send>) {
        self.trace = Some(sink);
    }

    pub fn map_address(&self, addr: u64) -> Result<DramCoord> {
        self.mapper.map(addr)
    }

    /// Out-of-range addresses report `true` so that `enqueue` can return
    /// the error.
    pub fn can_accept(&self, addr: u64, kind: ReqKind) -> bool {
        match self.mapper.map(addr) {
            Ok(c) => self.channels[c.channel as usize].can_accept(kind),
            Err(_) => true,
        }
    }

    pub fn enqueue(&mut self, req: MemRequest) -> Result<Enqueue> {
        let coord = self.mapper.map(req.addr)?;
        let ch = &mut self.channels[coord.channel as usize];
        if !ch.can_accept(req.kind) {
            return Ok(Enqueue::Full);
        }
        ch.push(Entry::new(req.id, req.addr, coord, self.clk, req.kind), self.clk);
        Ok(Enqueue::Accepted)
    }

    /// Simulates one memory cycle, appending finished requests to `out`.
    pub fn tick_into(&mut self, out: &mut Vec<Completion>) {
        let first = out.len();
        for ch in &mut self.channels {
            ch.tick(self.clk, out);
        }
        if let Some(trace) = &mut self.trace {
            let banks = self.org.banks_per_group;
            for c in &out[first..] {
                let bank = c.coord.bank_group * banks + c.coord.bank;
                // a failing trace sink should not abort the simulation
                let _ = writeln!(
                    trace,
                    "{} {} {:#x} {} {} {} {} {} {}",
                    c.finished,
                    c.kind,
                    c.addr,
                    c.coord.channel,
                    c.coord.rank,
                    bank,
                    c.coord.row,
                    c.coord.column,
                    c.latency()
                );
            }
        }
        self.clk += 1;
    }

    pub fn tick(&mut self) -> Vec<Completion> {
        let mut out = Vec::new();
        self.tick_into(&mut out);
        out
    }

    /// Requests queued or in flight.
    pub fn pending(&self) -> usize {
        self.channels.iter().map(Channel::pending).sum()
    }

    pub fn is_idle(&self) -> bool {
        self.pending() == 0
    }

    pub fn queued(&self, channel: u32, kind: ReqKind) -> usize {
        self.channels[channel as usize].queued(kind)
    }

    /// Earliest cycle at which any channel can make progress. Cycles before
    /// it may be skipped with [`advance_to`](Self::advance_to).
    pub fn next_event(&self) -> u64 {
        self.channels
            .iter()
            .map(Channel::next_event)
            .min()
            .unwrap_or(u64::MAX)
            .max(self.clk)
    }

    /// Jumps the clock forward without simulating; only valid up to
    /// [`next_event`](Self::next_event).
    pub fn advance_to(&mut self, clk: u64) {
        debug_assert!(clk <= self.next_event());
        self.clk = self.clk.max(clk);
    }

    /// Ticks until every queued request has completed or `max_cycles` pass.
    pub fn drain(&mut self, max_cycles: u64) -> Vec<Completion> {
        let mut out = Vec::new();
        let stop = self.clk + max_cycles;
        while !self.is_idle() && self.clk < stop {
            self.tick_into(&mut out);
        }
        out
    }

    pub fn stats(&self) -> DramStats {
        let mut s = DramStats {
            cycles: self.clk,
            channels: self.config.channels,
            peak_bytes_per_cycle: self.timings.peak_bytes_per_cycle(),
            ..DramStats::default()
        };
        for ch in &self.channels {
            s.absorb(&ch.stats);
        }
        s
    }

    pub fn flush_trace(&mut self) {
        if let Some(t) = &mut self.trace {
            let _ = t.flush();
        }
    }
}
