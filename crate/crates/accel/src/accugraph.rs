//! Vertex-centric pull over partitioned inverted CSR. Each partition
//! prefetches its source values into BRAM, then streams values and
//! pointers of all destinations and the partition's neighbor array.
//! Neighbor values come from 16 single-ported BRAM banks; a destination is
//! written back once all of its neighbors have been accumulated and only if
//! its value changed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use gpasim_dram::DramSim;
use gpasim_flow::{
    Callback, Engine, EngineConfig, FlowGraph, MergePolicy, NodeId, PhaseCycles, ProducerSpec, ReqKind, Workload,
};
use gpasim_graph::{build_partitioned_csr, CsrPartitions, Graph, GraphError, Problem, ProblemSpec, Values};
use serde::{Deserialize, Serialize};

use crate::common::{align, initial_discrete, min_candidate, sum_affine, AccelError, ModelStats, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccuGraphParams {
    pub vertex_pipelines: u32,
    pub edge_pipelines: u32,
    /// Pipeline depths. They bound accumulator occupancy in hardware and
    /// do not change the request stream.
    pub vertex_pipeline_size: u32,
    pub edge_pipeline_size: u32,
    /// Vertices per partition; `None` puts the whole vertex set in BRAM.
    pub partition_size: Option<usize>,
    pub bram_banks: u32,
    pub prefetch_skipping: bool,
    pub partition_skipping: bool,
}

impl Default for AccuGraphParams {
    fn default() -> Self {
        AccuGraphParams {
            vertex_pipelines: 8,
            edge_pipelines: 16,
            vertex_pipeline_size: 8,
            edge_pipeline_size: 8,
            partition_size: None,
            bram_banks: 16,
            prefetch_skipping: false,
            partition_skipping: false,
        }
    }
}

impl AccuGraphParams {
    pub fn with_optimizations(mut self) -> Self {
        self.prefetch_skipping = true;
        self.partition_skipping = true;
        self
    }

    /// Partition size actually used for a graph of `n` vertices.
    pub fn effective_k(&self, n: usize) -> usize {
        self.partition_size.unwrap_or(n).max(1)
    }

    fn validate(&self) -> Result<(), AccelError> {
        if self.vertex_pipelines == 0 || self.edge_pipelines == 0 || self.bram_banks == 0 {
            return Err(AccelError::Params("pipeline and bank counts must be positive".into()));
        }
        if self.partition_size == Some(0) {
            return Err(AccelError::Params("partition size 0".into()));
        }
        Ok(())
    }
}

/// Builds the inverted CSR partitions AccuGraph reads.
pub fn prepare_csr(graph: &Graph, params: &AccuGraphParams) -> CsrPartitions {
    build_partitioned_csr(graph, params.effective_k(graph.n()))
}

/// Next-free cycle of each BRAM bank; every bank serves one read per cycle.
#[derive(Debug, Clone)]
pub struct BramBanks {
    next_free: Vec<u64>,
}

impl BramBanks {
    pub fn new(banks: u32) -> Self {
        assert!(banks > 0, "at least one BRAM bank");
        BramBanks {
            next_free: vec![0; banks as usize],
        }
    }
}

/// Cycle at which the value of `vertex` can be read when requested at
/// `now`; reserves that slot of the vertex's bank.
pub fn bram_bank_delay(vertex: u32, banks: &mut BramBanks, now: u64) -> u64 {
    let n = banks.next_free.len() as u32;
    let slot = &mut banks.next_free[(vertex % n) as usize];
    let ready = now.max(*slot);
    *slot = ready + 1;
    ready
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkipDecision {
    pub prefetch: bool,
    pub run: bool,
}

/// Whether the next partition needs its values prefetched and whether it
/// needs to run at all. `dirty` tells if any source value of the partition
/// changed since it last ran.
pub fn skip_decisions(
    params: &AccuGraphParams,
    problem: Problem,
    prefetched: Option<usize>,
    next: usize,
    dirty: bool,
) -> SkipDecision {
    let run = !params.partition_skipping || problem.is_stationary() || dirty;
    let prefetch = !(params.prefetch_skipping && prefetched == Some(next));
    SkipDecision { prefetch, run }
}

const PREFETCH: u32 = 0;
const VALUE: u32 = 1;
const POINTER: u32 = 2;
const NEIGHBOR: u32 = 3;
const WRITE_KEEP: u32 = 4;
const WRITE_DROP: u32 = 5;
const WORD: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Prefetch,
    Stream,
    Draining,
    Finished,
}

enum Vals {
    Min {
        cur: Vec<u32>,
    },
    Sum {
        cur: Vec<f64>,
        next: Vec<f64>,
        out: Vec<u32>,
        base: f64,
        scale: f64,
    },
}

struct Nodes {
    prefetch: NodeId,
    values: NodeId,
    value_filter: NodeId,
    pointers: NodeId,
    neighbors: NodeId,
    writes: NodeId,
}

struct AccuGraph<'a> {
    csr: &'a CsrPartitions,
    spec: ProblemSpec,
    params: AccuGraphParams,
    n: usize,
    vb: u32,
    value_base: [u64; 2],
    pointer_base: Vec<u64>,
    neighbor_base: Vec<u64>,
    read_buf: usize,
    vals: Vals,
    dirty: Vec<bool>,
    changed_any: bool,
    part: usize,
    state: State,
    prefetched: Option<usize>,
    val_ok: Vec<bool>,
    ptr_ok: Vec<bool>,
    frontier: usize,
    counted: Vec<u32>,
    keep: Vec<bool>,
    pending: usize,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
    banks: BramBanks,
    outstanding: u64,
    nodes: Nodes,
    iteration: u32,
    prefetch_cycles: u64,
    stream_cycles: u64,
    state_since: u64,
    error: Option<GraphError>,
    stats: ModelStats,
}

impl<'a> AccuGraph<'a> {
    fn write_buf(&self) -> usize {
        match self.vals {
            Vals::Min { .. } => self.read_buf,
            Vals::Sum { .. } => 1 - self.read_buf,
        }
    }

    /// Synchronous problems compute the whole next vector up front; the
    /// per-partition passes only generate traffic.
    fn begin_iteration(&mut self) {
        self.changed_any = false;
        if let Vals::Sum {
            cur,
            next,
            out,
            base,
            scale,
        } = &mut self.vals
        {
            let mut sum = vec![0.0f64; self.n];
            for p in 0..self.csr.count() {
                let part = self.csr.part(p);
                for (v, s) in sum.iter_mut().enumerate() {
                    for &u in part.neighbors_of(v as u32) {
                        *s += match self.spec.problem {
                            Problem::Spmv => cur[u as usize],
                            _ => cur[u as usize] / out[u as usize] as f64,
                        };
                    }
                }
            }
            for (x, s) in next.iter_mut().zip(sum) {
                *x = *base + *scale * s;
            }
        }
    }

    /// Starts the first partition at or after `from` that must run, or ends
    /// the iteration.
    fn schedule(&mut self, from: usize, now: u64, flow: &mut FlowGraph) {
        let mut p = from;
        loop {
            if p == self.csr.count() {
                self.iteration += 1;
                if let Vals::Sum { cur, next, .. } = &mut self.vals {
                    std::mem::swap(cur, next);
                    self.read_buf = 1 - self.read_buf;
                }
                let done = if self.spec.problem.is_stationary() {
                    self.iteration >= self.spec.max_iterations
                } else {
                    !self.changed_any
                };
                if done {
                    self.state = State::Finished;
                    return;
                }
                self.begin_iteration();
                p = 0;
            }
            let d = skip_decisions(&self.params, self.spec.problem, self.prefetched, p, self.dirty[p]);
            if d.run {
                if let Err(e) = self.start_partition(p, d.prefetch, now, flow) {
                    self.error = Some(e);
                    self.state = State::Finished;
                }
                return;
            }
            self.stats.partitions_skipped += 1;
            p += 1;
        }
    }

    fn start_partition(&mut self, p: usize, prefetch: bool, now: u64, flow: &mut FlowGraph) -> Result<(), GraphError> {
        self.part = p;
        self.dirty[p] = false;
        self.stats.partitions_run += 1;
        let part = self.csr.part(p);
        self.keep.fill(false);
        match &mut self.vals {
            Vals::Min { cur } => {
                for v in 0..self.n {
                    let nb = part.neighbors_of(v as u32);
                    if nb.is_empty() {
                        continue;
                    }
                    let mut acc = cur[v];
                    for &u in nb {
                        if let Some(c) = min_candidate(&self.spec, cur[u as usize], 1)? {
                            acc = acc.min(c);
                        }
                    }
                    if acc < cur[v] {
                        cur[v] = acc;
                        self.keep[v] = true;
                        self.dirty[self.csr.partition_of(v as u32)] = true;
                        self.changed_any = true;
                        self.stats.updates += 1;
                    }
                }
            }
            Vals::Sum { .. } => {
                for v in 0..self.n {
                    self.keep[v] = !part.neighbors_of(v as u32).is_empty();
                }
            }
        }
        self.val_ok.fill(false);
        self.ptr_ok.fill(false);
        self.counted.fill(0);
        self.frontier = 0;
        self.pending = (0..self.n).filter(|&v| !part.neighbors_of(v as u32).is_empty()).count();
        if prefetch {
            let iv = self.csr.interval(p);
            let base = self.value_base[self.read_buf] + iv.lo as u64 * self.vb as u64;
            flow.reset_producer(
                self.nodes.prefetch,
                ProducerSpec::reads(base, iv.len() as u64, self.vb, PREFETCH),
            );
            self.outstanding += iv.len() as u64;
            self.prefetched = Some(p);
        } else {
            self.stats.prefetches_skipped += 1;
        }
        self.state = State::Prefetch;
        self.state_since = now;
        Ok(())
    }

    fn start_streams(&mut self, flow: &mut FlowGraph) {
        let p = self.part;
        let iv = self.csr.interval(p);
        let (lo, hi) = (iv.lo as u64, iv.hi as u64);
        flow.set_filter(self.nodes.value_filter, move |r| {
            let v = r.callbacks[0].start;
            !(lo..hi).contains(&v)
        });
        let n = self.n as u64;
        let vp = ProducerSpec::reads(self.value_base[self.read_buf], n, self.vb, VALUE);
        flow.reset_producer(self.nodes.values, vp);
        flow.reset_producer(
            self.nodes.pointers,
            ProducerSpec::reads(self.pointer_base[p], n + 1, WORD, POINTER),
        );
        let m = self.csr.part(p).edge_count() as u64;
        flow.reset_producer(
            self.nodes.neighbors,
            ProducerSpec::reads(self.neighbor_base[p], m, WORD, NEIGHBOR),
        );
        flow.set_producer_limit(self.nodes.neighbors, 0);
        self.outstanding += 2 * n + 1 + m;
        self.stats.edges_read += m;
        self.state = State::Stream;
    }

    fn advance_frontier(&mut self, flow: &mut FlowGraph) {
        let start = self.frontier;
        while self.frontier < self.n
            && self.val_ok[self.frontier]
            && self.ptr_ok[self.frontier]
            && self.ptr_ok[self.frontier + 1]
        {
            self.frontier += 1;
        }
        if self.frontier != start {
            let limit = self.csr.part(self.part).pointers[self.frontier];
            flow.set_producer_limit(self.nodes.neighbors, limit as u64);
        }
    }

    fn count(&mut self, v: u32, flow: &mut FlowGraph) {
        let v = v as usize;
        self.counted[v] += 1;
        if self.counted[v] as usize == self.csr.part(self.part).neighbors_of(v as u32).len() {
            let tag = if self.keep[v] { WRITE_KEEP } else { WRITE_DROP };
            let addr = self.value_base[self.write_buf()] + v as u64 * self.vb as u64;
            flow.push(
                self.nodes.writes,
                addr,
                self.vb,
                ReqKind::Write,
                Some(Callback::new(tag, v as u64, 1)),
            );
            self.outstanding += 1;
            self.pending -= 1;
            if self.keep[v] {
                self.stats.value_writes += 1;
            }
        }
    }
}

impl Workload for AccuGraph<'_> {
    fn tick(&mut self, flow: &mut FlowGraph, now: u64) {
        while let Some(&Reverse((ready, v))) = self.heap.peek() {
            if ready > now {
                break;
            }
            self.heap.pop();
            self.count(v, flow);
        }
        loop {
            match self.state {
                State::Prefetch => {
                    if !flow.producer_done(self.nodes.prefetch) {
                        return;
                    }
                    self.prefetch_cycles += now - self.state_since;
                    self.state_since = now;
                    self.start_streams(flow);
                }
                State::Stream => {
                    if self.pending > 0 || !self.heap.is_empty() || !flow.producer_done(self.nodes.neighbors) {
                        return;
                    }
                    flow.close(self.nodes.writes);
                    self.state = State::Draining;
                }
                State::Draining => {
                    if self.outstanding > 0 {
                        return;
                    }
                    flow.reopen(self.nodes.writes);
                    self.stream_cycles += now - self.state_since;
                    self.schedule(self.part + 1, now, flow);
                }
                State::Finished => return,
            }
        }
    }

    fn on_complete(&mut self, cb: Callback, flow: &mut FlowGraph, now: u64) {
        self.outstanding -= cb.len as u64;
        match cb.tag {
            VALUE => {
                for v in cb.start..cb.end() {
                    self.val_ok[v as usize] = true;
                }
                self.advance_frontier(flow);
            }
            POINTER => {
                for i in cb.start..cb.end() {
                    self.ptr_ok[i as usize] = true;
                }
                self.advance_frontier(flow);
            }
            NEIGHBOR => {
                let part = self.csr.part(self.part);
                for e in cb.start..cb.end() {
                    let e = e as usize;
                    let u = part.neighbors[e];
                    let v = part.owner_of(e);
                    let ready = bram_bank_delay(u, &mut self.banks, now);
                    self.stats.bank_stall_cycles += ready - now;
                    if ready <= now {
                        self.count(v, flow);
                    } else {
                        self.heap.push(Reverse((ready, v)));
                    }
                }
            }
            _ => {}
        }
    }

    fn is_done(&self) -> bool {
        self.state == State::Finished
    }

    fn iterations(&self) -> u32 {
        self.iteration
    }

    fn phases(&self) -> Vec<PhaseCycles> {
        vec![
            PhaseCycles::new("prefetch", self.prefetch_cycles),
            PhaseCycles::new("process", self.stream_cycles),
        ]
    }
}

/// Runs `spec` on AccuGraph. Min problems update values in place in the
/// order destinations are visited; SpMV/PageRank run `max_iterations`
/// synchronous sweeps. Edges are unweighted, so SSSP uses unit weights.
pub fn run_accugraph(
    csr: &CsrPartitions,
    spec: &ProblemSpec,
    params: &AccuGraphParams,
    dram: DramSim,
    engine: EngineConfig,
) -> Result<RunOutput, AccelError> {
    params.validate()?;
    let n = csr.n();
    spec.validate(n)?;
    if n == 0 {
        return Err(GraphError::NoVertices.into());
    }
    if csr.k() != params.effective_k(n) {
        return Err(AccelError::Params(format!(
            "CSR partitioned with k={} but parameters say k={}",
            csr.k(),
            params.effective_k(n)
        )));
    }
    let vb = spec.value_bytes();
    let stationary = spec.problem.is_stationary();
    let mut cursor = 0u64;
    let mut value_base = [0u64; 2];
    for (i, b) in value_base.iter_mut().enumerate() {
        *b = cursor;
        if i == 0 || stationary {
            cursor += align(n as u64 * vb as u64);
        }
    }
    if !stationary {
        value_base[1] = value_base[0];
    }
    let k = csr.count();
    let mut pointer_base = Vec::with_capacity(k);
    let mut neighbor_base = Vec::with_capacity(k);
    for p in 0..k {
        pointer_base.push(cursor);
        cursor += align((n as u64 + 1) * WORD as u64);
        neighbor_base.push(cursor);
        cursor += align(csr.part(p).edge_count() as u64 * WORD as u64);
    }
    let capacity = dram.mapper().capacity();
    if cursor > capacity {
        return Err(AccelError::Layout {
            channel: 0,
            needed: cursor,
            capacity,
        });
    }

    let vals = if stationary {
        let mut out = vec![0u32; n];
        for p in 0..k {
            for &u in &csr.part(p).neighbors {
                out[u as usize] += 1;
            }
        }
        let (base, scale) = sum_affine(spec, n);
        Vals::Sum {
            cur: vec![spec.initial_real(n); n],
            next: vec![0.0; n],
            out,
            base,
            scale,
        }
    } else {
        Vals::Min {
            cur: initial_discrete(spec, n),
        }
    };

    let mut flow = FlowGraph::new();
    let prefetch = flow.add_producer("prefetch", None);
    let values = flow.add_producer("values", Some(params.vertex_pipelines));
    let value_filter = flow.add_filter("bram-values", values, |_| true);
    let pointers = flow.add_producer("pointers", Some(params.vertex_pipelines));
    let neighbors = flow.add_producer("neighbors", Some(params.edge_pipelines));
    let writes = flow.add_queue("writes");
    let write_filter = flow.add_filter("unchanged", writes, |r| r.callbacks[0].tag == WRITE_KEEP);
    let prefetch_clb = flow.add_line_buffer("clb", prefetch);
    let values_clb = flow.add_line_buffer("clb", value_filter);
    let pointers_clb = flow.add_line_buffer("clb", pointers);
    let neighbors_clb = flow.add_line_buffer("clb", neighbors);
    let writes_clb = flow.add_line_buffer("clb", write_filter);
    let vertex = flow.add_merger("vertex", MergePolicy::RoundRobin, &[values_clb, pointers_clb]);
    let low = flow.add_merger("low", MergePolicy::Direct, &[prefetch_clb, vertex]);
    let root = flow.add_merger("priority", MergePolicy::Priority, &[writes_clb, neighbors_clb, low]);
    flow.set_root(root);

    let mut model = AccuGraph {
        csr,
        spec: spec.clone(),
        params: *params,
        n,
        vb,
        value_base,
        pointer_base,
        neighbor_base,
        read_buf: 0,
        vals,
        dirty: vec![true; k],
        changed_any: false,
        part: 0,
        state: State::Prefetch,
        prefetched: None,
        val_ok: vec![false; n],
        ptr_ok: vec![false; n + 1],
        frontier: 0,
        counted: vec![0; n],
        keep: vec![false; n],
        pending: 0,
        heap: BinaryHeap::new(),
        banks: BramBanks::new(params.bram_banks),
        outstanding: 0,
        nodes: Nodes {
            prefetch,
            values,
            value_filter,
            pointers,
            neighbors,
            writes,
        },
        iteration: 0,
        prefetch_cycles: 0,
        stream_cycles: 0,
        state_since: 0,
        error: None,
        stats: ModelStats::default(),
    };
    model.begin_iteration();
    model.schedule(0, 0, &mut flow);
    let sim = Engine::new(engine, dram, flow)?.run(&mut model)?;
    if let Some(e) = model.error {
        return Err(e.into());
    }
    let values = match model.vals {
        Vals::Min { cur } => Values::Discrete(cur),
        Vals::Sum { cur, .. } => Values::Real(cur),
    };
    Ok(RunOutput {
        sim,
        values,
        stats: model.stats,
    })
}
