use serde::Serialize;

/// Counters accumulated over the whole run, summed across channels.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DramStats {
    pub cycles: u64,
    pub channels: u32,
    pub reads: u64,
    pub writes: u64,
    pub row_hits: u64,
    pub row_misses: u64,
    pub row_conflicts: u64,
    pub activates: u64,
    pub precharges: u64,
    pub refreshes: u64,
    pub bytes_read: u64,
    pub bytes_written: u64,
    /// Data-bus cycles spent transferring bursts.
    pub busy_cycles: u64,
    pub read_latency_total: u64,
    pub read_latency_max: u64,
    /// Peak bytes per cycle of a single channel.
    pub peak_bytes_per_cycle: f64,
}

impl DramStats {
    pub fn requests(&self) -> u64 {
        self.reads + self.writes
    }

    pub fn row_hit_rate(&self) -> f64 {
        let all = self.row_hits + self.row_misses + self.row_conflicts;
        if all == 0 {
            0.0
        } else {
            self.row_hits as f64 / all as f64
        }
    }

    pub fn avg_read_latency(&self) -> f64 {
        if self.reads == 0 {
            0.0
        } else {
            self.read_latency_total as f64 / self.reads as f64
        }
    }

    /// Achieved fraction of the aggregate peak bandwidth over `cycles`.
    pub fn bandwidth_utilization(&self) -> f64 {
        let peak = self.peak_bytes_per_cycle * self.channels as f64 * self.cycles as f64;
        if peak == 0.0 {
            0.0
        } else {
            (self.bytes_read + self.bytes_written) as f64 / peak
        }
    }

    pub(crate) fn absorb(&mut self, other: &DramStats) {
        self.reads += other.reads;
        self.writes += other.writes;
        self.row_hits += other.row_hits;
        self.row_misses += other.row_misses;
        self.row_conflicts += other.row_conflicts;
        self.activates += other.activates;
        self.precharges += other.precharges;
        self.refreshes += other.refreshes;
        self.bytes_read += other.bytes_read;
        self.bytes_written += other.bytes_written;
        self.busy_cycles += other.busy_cycles;
        self.read_latency_total += other.read_latency_total;
        self.read_latency_max = self.read_latency_max.max(other.read_latency_max);
    }
}
