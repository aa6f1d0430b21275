//! Edge-centric scatter/gather. Partitions are source-vertex intervals
//! statically assigned to channels round-robin; PE `c` works on the
//! partitions of channel `c`. Scatter reads edges and appends updates to
//! the destination partition's queue (possibly on another channel), gather
//! reads each queue and writes the updated values.

use std::collections::VecDeque;

use gpasim_dram::DramSim;
use gpasim_flow::{
    channel_address, Callback, Engine, EngineConfig, FlowGraph, MergePolicy, NodeId, PhaseCycles, ProducerSpec,
    ReqKind, Workload,
};
use gpasim_graph::{
    partition_edge_list, sort_partition_edges_by_destination, EdgeListPartitions, Graph, GraphError, Problem,
    ProblemSpec, Values,
};
use serde::{Deserialize, Serialize};

use crate::common::{align, initial_discrete, min_candidate, sum_affine, AccelError, ModelStats, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HitGraphParams {
    /// Processing elements, one per memory channel.
    pub pes: u32,
    /// Edges (scatter) or updates (gather) consumed per cycle and PE.
    pub pipelines: u32,
    /// Vertices per partition.
    pub partition_size: usize,
    pub update_merging: bool,
    pub active_filter: bool,
    pub partition_skipping: bool,
}

impl Default for HitGraphParams {
    fn default() -> Self {
        HitGraphParams {
            pes: 4,
            pipelines: 8,
            partition_size: 256_000,
            update_merging: true,
            active_filter: true,
            partition_skipping: true,
        }
    }
}

impl HitGraphParams {
    pub fn without_optimizations(mut self) -> Self {
        self.update_merging = false;
        self.active_filter = false;
        self.partition_skipping = false;
        self
    }

    fn validate(&self) -> Result<(), AccelError> {
        if self.pes == 0 || self.pipelines == 0 || self.partition_size == 0 {
            return Err(AccelError::Params(format!(
                "p={}, q={}, k={} must all be positive",
                self.pes, self.pipelines, self.partition_size
            )));
        }
        Ok(())
    }
}

/// Partitions `graph` the way HitGraph expects it: destination-sorted
/// within each partition when update merging is on.
pub fn prepare_edge_lists(graph: &Graph, params: &HitGraphParams) -> EdgeListPartitions {
    let parts = partition_edge_list(graph, params.partition_size);
    if params.update_merging {
        sort_partition_edges_by_destination(parts)
    } else {
        parts
    }
}

const PREFETCH: u32 = 0;
const EDGES: u32 = 1;
const UPDATES: u32 = 2;
const VALUE_WRITE: u32 = 3;
const UPDATE_WRITE: u32 = 4;
const UPDATE_BYTES: u32 = 8;

fn tag(kind: u32, part: usize) -> u32 {
    (part as u32) << 3 | kind
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Scatter,
    Gather,
    Finished,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Idle,
    Prefetch(usize),
    Stream,
}

struct Pe {
    todo: VecDeque<usize>,
    step: Step,
    prefetch: NodeId,
    edges: NodeId,
    updates: NodeId,
    value_writes: NodeId,
}

#[derive(Debug, Clone, Copy)]
struct Update {
    /// Index of the edge whose read completes the update.
    edge: u32,
    dst: u32,
    /// Infinite for labels that cannot improve anything (unreached source).
    val: f64,
}

enum Vals {
    Min {
        cur: Vec<u32>,
        next: Vec<u32>,
    },
    Sum {
        cur: Vec<f64>,
        acc: Vec<f64>,
        out: Vec<u32>,
        base: f64,
        scale: f64,
    },
}

struct Layout {
    values: Vec<u64>,
    edges: Vec<u64>,
    queues: Vec<u64>,
}

fn layout(parts: &EdgeListPartitions, p: usize, vb: u32, eb: u32, capacity: u64) -> Result<Layout, AccelError> {
    let k = parts.count();
    let mut in_edges = vec![0u64; k];
    for s in 0..k {
        for e in parts.edges(s) {
            in_edges[parts.partition_of(e.dst)] += 1;
        }
    }
    let mut l = Layout {
        values: vec![0; k],
        edges: vec![0; k],
        queues: vec![0; k],
    };
    for c in 0..p {
        let mine: Vec<usize> = (c..k).step_by(p).collect();
        let mut cursor = 0u64;
        for &s in &mine {
            l.values[s] = channel_address(c as u32, cursor);
            cursor += align(parts.interval(s).len() as u64 * vb as u64);
        }
        for &s in &mine {
            l.edges[s] = channel_address(c as u32, cursor);
            cursor += align(parts.edges(s).len() as u64 * eb as u64);
        }
        for &d in &mine {
            l.queues[d] = channel_address(c as u32, cursor);
            cursor += align(in_edges[d] * UPDATE_BYTES as u64);
        }
        if cursor > capacity {
            return Err(AccelError::Layout {
                channel: c as u32,
                needed: cursor,
                capacity,
            });
        }
    }
    Ok(l)
}

struct HitGraph<'a> {
    parts: &'a EdgeListPartitions,
    spec: ProblemSpec,
    params: HitGraphParams,
    vb: u32,
    eb: u32,
    layout: Layout,
    vals: Vals,
    active: Vec<bool>,
    changed_any: bool,
    plans: Vec<Vec<Update>>,
    edges_left: Vec<u64>,
    queue_dsts: Vec<Vec<u32>>,
    pes: Vec<Pe>,
    update_queues: Vec<NodeId>,
    phase: Phase,
    closing: bool,
    outstanding: u64,
    streaming: u64,
    iteration: u32,
    phase_start: u64,
    scatter_cycles: u64,
    gather_cycles: u64,
    error: Option<GraphError>,
    stats: ModelStats,
}

impl<'a> HitGraph<'a> {
    fn start_scatter(&mut self, flow: &mut FlowGraph) {
        self.phase = Phase::Scatter;
        self.closing = false;
        for &q in &self.update_queues {
            flow.reopen(q);
        }
        for q in &mut self.queue_dsts {
            q.clear();
        }
        match &mut self.vals {
            Vals::Min { cur, next } => next.copy_from_slice(cur),
            Vals::Sum { acc, .. } => acc.fill(0.0),
        }
        let p = self.pes.len();
        for s in 0..self.parts.count() {
            let iv = self.parts.interval(s);
            if self.params.partition_skipping && !self.active[iv.lo as usize..iv.hi as usize].iter().any(|&a| a) {
                self.stats.partitions_skipped += 1;
                continue;
            }
            self.pes[s % p].todo.push_back(s);
        }
    }

    fn start_gather(&mut self, flow: &mut FlowGraph) {
        self.phase = Phase::Gather;
        self.closing = false;
        for pe in &self.pes {
            flow.reopen(pe.value_writes);
        }
        if !self.spec.problem.is_stationary() {
            self.active.fill(false);
        }
        self.changed_any = false;
        let p = self.pes.len();
        for d in 0..self.parts.count() {
            if self.params.partition_skipping && self.queue_dsts[d].is_empty() {
                self.apply_gather(d);
                self.stats.partitions_skipped += 1;
            } else {
                self.pes[d % p].todo.push_back(d);
            }
        }
    }

    /// Functional effect of gathering partition `d`; all of its updates
    /// have been accumulated by the preceding scatter phase.
    fn apply_gather(&mut self, d: usize) {
        let iv = self.parts.interval(d);
        let range = iv.lo as usize..iv.hi as usize;
        match &mut self.vals {
            Vals::Min { cur, next } => {
                for v in range {
                    if next[v] < cur[v] {
                        cur[v] = next[v];
                        self.active[v] = true;
                        self.changed_any = true;
                    }
                }
            }
            Vals::Sum {
                cur, acc, base, scale, ..
            } => {
                for v in range {
                    cur[v] = *base + *scale * acc[v];
                }
            }
        }
    }

    fn start_prefetch(&mut self, c: usize, s: usize, flow: &mut FlowGraph) {
        let len = self.parts.interval(s).len() as u64;
        let spec = ProducerSpec::reads(self.layout.values[s], len, self.vb, tag(PREFETCH, s));
        flow.reset_producer(self.pes[c].prefetch, spec);
        self.outstanding += len;
    }

    fn start_stream(&mut self, c: usize, s: usize, flow: &mut FlowGraph) {
        if self.phase == Phase::Gather {
            self.apply_gather(s);
            let len = self.queue_dsts[s].len() as u64;
            let spec = ProducerSpec::reads(self.layout.queues[s], len, UPDATE_BYTES, tag(UPDATES, s));
            flow.reset_producer(self.pes[c].updates, spec);
            self.outstanding += len;
            self.streaming += len;
            return;
        }
        let plan = match self.plan(s) {
            Ok(plan) => plan,
            Err(e) => {
                self.abort(e, flow);
                return;
            }
        };
        let m = self.parts.edges(s).len() as u64;
        self.plans[s] = plan;
        self.edges_left[s] = m;
        let spec = ProducerSpec::reads(self.layout.edges[s], m, self.eb, tag(EDGES, s));
        flow.reset_producer(self.pes[c].edges, spec);
        self.outstanding += m;
        self.streaming += m;
        self.stats.edges_read += m;
    }

    /// Updates produced by partition `s` from the current values, keyed by
    /// the edge whose arrival releases them.
    fn plan(&self, s: usize) -> Result<Vec<Update>, GraphError> {
        let mut plan: Vec<Update> = Vec::new();
        let min = matches!(self.vals, Vals::Min { .. });
        for (i, e) in self.parts.edges(s).iter().enumerate() {
            let u = e.src as usize;
            if self.params.active_filter && !self.active[u] {
                continue;
            }
            let val = match &self.vals {
                Vals::Min { cur, .. } => match min_candidate(&self.spec, cur[u], e.weight)? {
                    Some(c) => c as f64,
                    None => f64::INFINITY,
                },
                Vals::Sum { cur, out, .. } => match self.spec.problem {
                    Problem::Spmv => e.weight as f64 * cur[u],
                    _ => cur[u] / out[u] as f64,
                },
            };
            if self.params.update_merging {
                if let Some(last) = plan.last_mut().filter(|l| l.dst == e.dst) {
                    last.edge = i as u32;
                    last.val = if min { last.val.min(val) } else { last.val + val };
                    continue;
                }
            }
            plan.push(Update {
                edge: i as u32,
                dst: e.dst,
                val,
            });
        }
        Ok(plan)
    }

    fn abort(&mut self, e: GraphError, flow: &mut FlowGraph) {
        self.error = Some(e);
        self.phase = Phase::Finished;
        for &q in &self.update_queues {
            flow.close(q);
        }
        for pe in &self.pes {
            flow.close(pe.value_writes);
        }
    }

    fn finish_phase(&mut self, now: u64, flow: &mut FlowGraph) {
        let spent = now - self.phase_start;
        self.phase_start = now;
        if self.phase == Phase::Scatter {
            self.scatter_cycles += spent;
            self.start_gather(flow);
            return;
        }
        self.gather_cycles += spent;
        self.iteration += 1;
        let done = if self.spec.problem.is_stationary() {
            self.iteration >= self.spec.max_iterations
        } else {
            !self.changed_any
        };
        if done {
            self.phase = Phase::Finished;
        } else {
            self.start_scatter(flow);
        }
    }

    fn apply_update(&mut self, u: Update) {
        match &mut self.vals {
            Vals::Min { next, .. } => {
                if u.val.is_finite() {
                    let slot = &mut next[u.dst as usize];
                    *slot = (*slot).min(u.val as u32);
                }
            }
            Vals::Sum { acc, .. } => acc[u.dst as usize] += u.val,
        }
    }
}

impl Workload for HitGraph<'_> {
    fn tick(&mut self, flow: &mut FlowGraph, now: u64) {
        if self.phase == Phase::Finished {
            return;
        }
        for c in 0..self.pes.len() {
            loop {
                match self.pes[c].step {
                    Step::Idle => match self.pes[c].todo.pop_front() {
                        Some(s) => {
                            self.start_prefetch(c, s, flow);
                            self.pes[c].step = Step::Prefetch(s);
                            self.stats.partitions_run += 1;
                        }
                        None => break,
                    },
                    Step::Prefetch(s) => {
                        if !flow.producer_done(self.pes[c].prefetch) {
                            break;
                        }
                        self.start_stream(c, s, flow);
                        if self.phase == Phase::Finished {
                            return;
                        }
                        self.pes[c].step = Step::Stream;
                    }
                    Step::Stream => {
                        let node = match self.phase {
                            Phase::Scatter => self.pes[c].edges,
                            _ => self.pes[c].updates,
                        };
                        if !flow.producer_done(node) {
                            break;
                        }
                        self.pes[c].step = Step::Idle;
                    }
                }
            }
        }
        let idle = self
            .pes
            .iter()
            .all(|pe| matches!(pe.step, Step::Idle) && pe.todo.is_empty());
        if self.streaming == 0 && idle {
            if !self.closing {
                self.closing = true;
                if self.phase == Phase::Scatter {
                    for &q in &self.update_queues {
                        flow.close(q);
                    }
                } else {
                    for pe in &self.pes {
                        flow.close(pe.value_writes);
                    }
                }
            }
            if self.outstanding == 0 {
                self.finish_phase(now, flow);
            }
        }
    }

    fn on_complete(&mut self, cb: Callback, flow: &mut FlowGraph, _now: u64) {
        self.outstanding -= cb.len as u64;
        if self.phase == Phase::Finished {
            return;
        }
        let part = (cb.tag >> 3) as usize;
        match cb.tag & 7 {
            EDGES => {
                self.streaming -= cb.len as u64;
                let plan = &self.plans[part];
                let lo = plan.partition_point(|u| (u.edge as u64) < cb.start);
                let hi = plan.partition_point(|u| (u.edge as u64) < cb.end());
                for i in lo..hi {
                    let u = self.plans[part][i];
                    self.apply_update(u);
                    let d = self.parts.partition_of(u.dst);
                    let idx = self.queue_dsts[d].len() as u64;
                    self.queue_dsts[d].push(u.dst);
                    let addr = self.layout.queues[d] + idx * UPDATE_BYTES as u64;
                    let cb = Callback::new(tag(UPDATE_WRITE, d), idx, 1);
                    flow.push(self.update_queues[d], addr, UPDATE_BYTES, ReqKind::Write, Some(cb));
                    self.outstanding += 1;
                    self.stats.updates += 1;
                }
                self.edges_left[part] -= cb.len as u64;
                if self.edges_left[part] == 0 {
                    self.plans[part] = Vec::new();
                }
            }
            UPDATES => {
                self.streaming -= cb.len as u64;
                let lo = self.parts.interval(part).lo;
                let node = self.pes[part % self.pes.len()].value_writes;
                for i in cb.start..cb.end() {
                    let v = self.queue_dsts[part][i as usize];
                    let addr = self.layout.values[part] + (v - lo) as u64 * self.vb as u64;
                    flow.push(
                        node,
                        addr,
                        self.vb,
                        ReqKind::Write,
                        Some(Callback::new(tag(VALUE_WRITE, part), v as u64, 1)),
                    );
                    self.outstanding += 1;
                    self.stats.value_writes += 1;
                }
            }
            _ => {}
        }
    }

    fn is_done(&self) -> bool {
        self.phase == Phase::Finished
    }

    fn iterations(&self) -> u32 {
        self.iteration
    }

    fn phases(&self) -> Vec<PhaseCycles> {
        vec![
            PhaseCycles::new("scatter", self.scatter_cycles),
            PhaseCycles::new("gather", self.gather_cycles),
        ]
    }
}

/// Runs `spec` on HitGraph until convergence (or `max_iterations` sweeps
/// for SpMV/PageRank). Edge records are 12 bytes for weighted partitions
/// and 8 bytes otherwise.
pub fn run_hitgraph(
    parts: &EdgeListPartitions,
    spec: &ProblemSpec,
    params: &HitGraphParams,
    dram: DramSim,
    engine: EngineConfig,
) -> Result<RunOutput, AccelError> {
    params.validate()?;
    let n = parts.n();
    spec.validate(n)?;
    if parts.k() != params.partition_size {
        return Err(AccelError::Params(format!(
            "edge lists partitioned with k={} but parameters say k={}",
            parts.k(),
            params.partition_size
        )));
    }
    if params.update_merging && !parts.is_dst_sorted() {
        return Err(AccelError::Params(
            "update merging needs destination-sorted partitions".into(),
        ));
    }
    let channels = dram.config().channels;
    if params.pes > channels {
        return Err(AccelError::Params(format!(
            "{} PEs but only {channels} memory channels",
            params.pes
        )));
    }
    let p = params.pes as usize;
    let vb = spec.value_bytes();
    let eb = if parts.is_weighted() { 12 } else { 8 };
    let layout = layout(parts, p, vb, eb, dram.mapper().channel_capacity())?;

    let vals = if spec.problem.is_stationary() {
        let mut out = vec![0u32; n];
        for s in 0..parts.count() {
            for e in parts.edges(s) {
                out[e.src as usize] += 1;
            }
        }
        let (base, scale) = sum_affine(spec, n);
        Vals::Sum {
            cur: vec![spec.initial_real(n); n],
            acc: vec![0.0; n],
            out,
            base,
            scale,
        }
    } else {
        let cur = initial_discrete(spec, n);
        Vals::Min { next: cur.clone(), cur }
    };
    let active = match &vals {
        Vals::Min { cur, .. } if spec.problem != Problem::Wcc => cur.iter().map(|&v| v != spec.unreached()).collect(),
        _ => vec![true; n],
    };

    let mut flow = FlowGraph::new();
    let mut pes = Vec::with_capacity(p);
    let mut inputs: Vec<Vec<NodeId>> = Vec::with_capacity(p);
    for _ in 0..p {
        let prefetch = flow.add_producer("prefetch", None);
        let edges = flow.add_producer("edges", Some(params.pipelines));
        let updates = flow.add_producer("update-reads", Some(params.pipelines));
        let value_writes = flow.add_queue("value-writes");
        inputs.push(
            [prefetch, edges, updates, value_writes]
                .iter()
                .map(|&id| flow.add_line_buffer("clb", id))
                .collect(),
        );
        pes.push(Pe {
            todo: VecDeque::new(),
            step: Step::Idle,
            prefetch,
            edges,
            updates,
            value_writes,
        });
    }
    let k = parts.count();
    let mut update_queues = Vec::with_capacity(k);
    for d in 0..k {
        let q = flow.add_queue("update-writes");
        let clb = flow.add_line_buffer("clb", q);
        inputs[d % p].push(clb);
        update_queues.push(q);
    }
    let merged: Vec<NodeId> = inputs
        .iter()
        .map(|ins| flow.add_merger("pe", MergePolicy::Direct, ins))
        .collect();
    let root = flow.add_merger("channels", MergePolicy::RoundRobin, &merged);
    flow.set_root(root);

    let mut model = HitGraph {
        parts,
        spec: spec.clone(),
        params: *params,
        vb,
        eb,
        layout,
        vals,
        active,
        changed_any: false,
        plans: vec![Vec::new(); k],
        edges_left: vec![0; k],
        queue_dsts: vec![Vec::new(); k],
        pes,
        update_queues,
        phase: Phase::Scatter,
        closing: false,
        outstanding: 0,
        streaming: 0,
        iteration: 0,
        phase_start: 0,
        scatter_cycles: 0,
        gather_cycles: 0,
        error: None,
        stats: ModelStats::default(),
    };
    model.start_scatter(&mut flow);
    let sim = Engine::new(engine, dram, flow)?
        .with_channel_local_addresses()
        .run(&mut model)?;
    if let Some(e) = model.error {
        return Err(e.into());
    }
    let values = match model.vals {
        Vals::Min { cur, .. } => Values::Discrete(cur),
        Vals::Sum { cur, .. } => Values::Real(cur),
    };
    Ok(RunOutput {
        sim,
        values,
        stats: model.stats,
    })
}
