use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use gpasim_dram::{ReqKind, LINE_BYTES};

use crate::request::{push_callback, Callback, Callbacks, Request};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    fn ix(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergePolicy {
    /// Oldest head first, ties by input order.
    Direct,
    /// Rotates over inputs, skipping empty ones and ones the sink refuses.
    RoundRobin,
    /// First input in list order wins; if its head is refused nothing goes.
    Priority,
}

/// A run of `count` equally sized elements at `base + j * stride * width`.
///
/// Element `j` carries the callback `(tag, first_index + j, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProducerSpec {
    pub base: u64,
    pub count: u64,
    pub width: u32,
    pub stride: u64,
    pub kind: ReqKind,
    pub tag: u32,
    pub first_index: u64,
}

impl ProducerSpec {
    pub fn reads(base: u64, count: u64, width: u32, tag: u32) -> Self {
        assert!(width > 0, "element width must be positive");
        ProducerSpec {
            base,
            count,
            width,
            stride: 1,
            kind: ReqKind::Read,
            tag,
            first_index: 0,
        }
    }

    pub fn idle() -> Self {
        ProducerSpec::reads(0, 0, 1, 0)
    }

    pub fn with_first_index(mut self, first: u64) -> Self {
        self.first_index = first;
        self
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_kind(mut self, kind: ReqKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn address(&self, j: u64) -> u64 {
        self.base + j * self.stride * self.width as u64
    }
}

/// Element and line counts. At quiescence
/// `produced + split_extra == filtered + coalesced + served`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct FlowCounters {
    pub produced: u64,
    pub split_extra: u64,
    pub filtered: u64,
    pub coalesced: u64,
    pub served: u64,
}

type Predicate = Box<dyn FnMut(&Request) -> bool + Send>;

struct Producer {
    spec: ProducerSpec,
    emitted: u64,
    limit: u64,
    rate: Option<u32>,
    budget: u32,
    head: Option<Request>,
}

struct Queue {
    items: VecDeque<Request>,
    closed: bool,
}

struct LineBuffer {
    input: NodeId,
    held: Option<Request>,
    out: VecDeque<Request>,
    flush: bool,
}

struct Filter {
    input: NodeId,
    keep: Predicate,
    head: Option<Request>,
}

struct Merger {
    policy: MergePolicy,
    inputs: Vec<NodeId>,
    next: usize,
    sel: Option<usize>,
}

enum Kind {
    Producer(Producer),
    Queue(Queue),
    Buffer(LineBuffer),
    Filter(Filter),
    Merger(Merger),
}

struct Node {
    label: String,
    served: u64,
    kind: Kind,
}

/// Arena of request-flow nodes. Nodes are pulled from the root: `ready`
/// materializes a head if one can be produced, `pop` removes it.
#[derive(Default)]
pub struct FlowGraph {
    nodes: Vec<Node>,
    root: Option<NodeId>,
    now: u64,
    instant: Vec<Callback>,
    counters: FlowCounters,
}

impl fmt::Debug for FlowGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowGraph")
            .field("nodes", &self.nodes.len())
            .field("root", &self.root)
            .field("counters", &self.counters)
            .finish()
    }
}

impl FlowGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, label: &str, kind: Kind) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            label: label.to_string(),
            served: 0,
            kind,
        });
        id
    }

    fn check_input(&self, input: NodeId) {
        assert!(input.ix() < self.nodes.len(), "unknown input node {input}");
    }

    /// A producer starts idle; give it work with [`reset_producer`](Self::reset_producer).
    pub fn add_producer(&mut self, label: &str, rate: Option<u32>) -> NodeId {
        assert!(rate != Some(0), "a rate limit of 0 would never emit");
        self.add(
            label,
            Kind::Producer(Producer {
                spec: ProducerSpec::idle(),
                emitted: 0,
                limit: u64::MAX,
                rate,
                budget: rate.unwrap_or(u32::MAX),
                head: None,
            }),
        )
    }

    pub fn add_queue(&mut self, label: &str) -> NodeId {
        self.add(
            label,
            Kind::Queue(Queue {
                items: VecDeque::new(),
                closed: false,
            }),
        )
    }

    pub fn add_line_buffer(&mut self, label: &str, input: NodeId) -> NodeId {
        self.check_input(input);
        self.add(
            label,
            Kind::Buffer(LineBuffer {
                input,
                held: None,
                out: VecDeque::new(),
                flush: false,
            }),
        )
    }

    /// Requests for which `keep` returns false are dropped and their
    /// callbacks are fired without touching memory.
    pub fn add_filter(
        &mut self,
        label: &str,
        input: NodeId,
        keep: impl FnMut(&Request) -> bool + Send + 'static,
    ) -> NodeId {
        self.check_input(input);
        self.add(
            label,
            Kind::Filter(Filter {
                input,
                keep: Box::new(keep),
                head: None,
            }),
        )
    }

    pub fn add_merger(&mut self, label: &str, policy: MergePolicy, inputs: &[NodeId]) -> NodeId {
        assert!(!inputs.is_empty(), "a merger needs at least one input");
        for &i in inputs {
            self.check_input(i);
        }
        self.add(
            label,
            Kind::Merger(Merger {
                policy,
                inputs: inputs.to_vec(),
                next: 0,
                sel: None,
            }),
        )
    }

    pub fn set_root(&mut self, root: NodeId) {
        self.check_input(root);
        self.root = Some(root);
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id.ix()].label
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn counters(&self) -> FlowCounters {
        self.counters
    }

    /// Lines popped from the root, attributed to the node that created them.
    pub fn served_by_source(&self) -> impl Iterator<Item = (&str, u64)> {
        self.nodes
            .iter()
            .filter(|n| n.served > 0)
            .map(|n| (n.label.as_str(), n.served))
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    /// Starts accelerator cycle `now`: refills producer rate budgets.
    pub fn begin_tick(&mut self, now: u64) {
        self.now = now;
        for n in &mut self.nodes {
            if let Kind::Producer(p) = &mut n.kind {
                p.budget = p.rate.unwrap_or(u32::MAX);
            }
        }
    }

    fn producer(&mut self, id: NodeId) -> &mut Producer {
        match &mut self.nodes[id.ix()].kind {
            Kind::Producer(p) => p,
            _ => panic!("node {id} is not a producer"),
        }
    }

    fn queue(&mut self, id: NodeId) -> &mut Queue {
        match &mut self.nodes[id.ix()].kind {
            Kind::Queue(q) => q,
            _ => panic!("node {id} is not a queue"),
        }
    }

    /// Replaces the producer's work. Elements not yet emitted are discarded.
    pub fn reset_producer(&mut self, id: NodeId, spec: ProducerSpec) {
        assert!(spec.width > 0, "element width must be positive");
        let p = self.producer(id);
        assert!(p.head.is_none(), "producer {id} reset while holding a request");
        p.spec = spec;
        p.emitted = 0;
        p.limit = u64::MAX;
    }

    /// Caps emission to the first `limit` elements until raised again.
    pub fn set_producer_limit(&mut self, id: NodeId, limit: u64) {
        self.producer(id).limit = limit;
    }

    /// All elements of the current spec have left the producer.
    pub fn producer_done(&mut self, id: NodeId) -> bool {
        let p = self.producer(id);
        p.head.is_none() && p.emitted >= p.spec.count
    }

    pub fn producer_emitted(&mut self, id: NodeId) -> u64 {
        let p = self.producer(id);
        p.emitted - p.head.is_some() as u64
    }

    pub fn push(&mut self, id: NodeId, addr: u64, bytes: u32, kind: ReqKind, cb: Option<Callback>) {
        assert!(bytes > 0, "zero-sized request");
        let mut callbacks = Callbacks::new();
        if let Some(cb) = cb {
            callbacks.push(cb);
        }
        let stamp = self.now;
        let q = self.queue(id);
        assert!(!q.closed, "push to closed queue {id}");
        q.items.push_back(Request {
            addr,
            bytes,
            kind,
            stamp,
            source: id,
            callbacks,
        });
        self.counters.produced += 1;
    }

    /// A closed, empty queue counts as finished, which lets a downstream
    /// cache-line buffer release its partial line.
    pub fn close(&mut self, id: NodeId) {
        self.queue(id).closed = true;
    }

    pub fn reopen(&mut self, id: NodeId) {
        self.queue(id).closed = false;
    }

    pub fn queue_len(&mut self, id: NodeId) -> usize {
        self.queue(id).items.len()
    }

    /// Asks a cache-line buffer to emit its partial line once its input runs dry.
    pub fn flush(&mut self, id: NodeId) {
        match &mut self.nodes[id.ix()].kind {
            Kind::Buffer(b) => b.flush = true,
            _ => panic!("node {id} is not a cache-line buffer"),
        }
    }

    pub fn set_filter(&mut self, id: NodeId, keep: impl FnMut(&Request) -> bool + Send + 'static) {
        match &mut self.nodes[id.ix()].kind {
            Kind::Filter(f) => f.keep = Box::new(keep),
            _ => panic!("node {id} is not a filter"),
        }
    }

    /// Callbacks of filtered requests, to be delivered this cycle.
    pub fn take_instant(&mut self) -> Vec<Callback> {
        std::mem::take(&mut self.instant)
    }

    pub fn has_instant(&self) -> bool {
        !self.instant.is_empty()
    }

    /// Nothing buffered anywhere and no producer with elements left.
    pub fn is_idle(&self) -> bool {
        self.instant.is_empty() && self.nodes.iter().all(|n| node_empty(&n.kind))
    }

    /// One line per node still holding work, for deadlock reports.
    pub fn pending_report(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let detail = match &n.kind {
                Kind::Producer(p) if p.emitted < p.spec.count || p.head.is_some() => format!(
                    "producer emitted {}/{} (limit {}, head {})",
                    p.emitted,
                    p.spec.count,
                    p.limit,
                    p.head.is_some()
                ),
                Kind::Queue(q) if !q.items.is_empty() => format!("queue len {} closed {}", q.items.len(), q.closed),
                Kind::Buffer(b) if b.held.is_some() || !b.out.is_empty() => {
                    format!("line buffer held {} out {}", b.held.is_some(), b.out.len())
                }
                Kind::Filter(f) if f.head.is_some() => "filter head".to_string(),
                _ => continue,
            };
            let _ = writeln!(s, "  #{i} {}: {detail}", n.label);
        }
        s
    }

    /// No more requests will ever come out of `id` without outside action.
    fn finished(&self, id: NodeId) -> bool {
        match &self.nodes[id.ix()].kind {
            Kind::Producer(p) => p.head.is_none() && p.emitted >= p.spec.count,
            Kind::Queue(q) => q.closed && q.items.is_empty(),
            Kind::Buffer(b) => b.held.is_none() && b.out.is_empty() && self.finished(b.input),
            Kind::Filter(f) => f.head.is_none() && self.finished(f.input),
            Kind::Merger(m) => m.inputs.iter().all(|&i| self.finished(i)),
        }
    }

    /// Head of a node that reported `ready`.
    pub fn head(&self, id: NodeId) -> &Request {
        match &self.nodes[id.ix()].kind {
            Kind::Producer(p) => p.head.as_ref(),
            Kind::Queue(q) => q.items.front(),
            Kind::Buffer(b) => b.out.front(),
            Kind::Filter(f) => f.head.as_ref(),
            Kind::Merger(m) => return self.head(m.inputs[m.sel.expect("merger polled without selection")]),
        }
        .expect("head of an empty node")
    }

    /// Makes a head available at `id` if possible. Mergers only select heads
    /// that `accept` approves.
    pub fn ready(&mut self, id: NodeId, accept: &dyn Fn(&Request) -> bool) -> bool {
        match &self.nodes[id.ix()].kind {
            Kind::Producer(_) => self.ready_producer(id),
            Kind::Queue(q) => !q.items.is_empty(),
            Kind::Buffer(_) => self.ready_buffer(id),
            Kind::Filter(_) => self.ready_filter(id),
            Kind::Merger(_) => self.ready_merger(id, accept),
        }
    }

    pub fn pop(&mut self, id: NodeId) -> Request {
        match &mut self.nodes[id.ix()].kind {
            Kind::Producer(p) => p.head.take(),
            Kind::Queue(q) => q.items.pop_front(),
            Kind::Buffer(b) => b.out.pop_front(),
            Kind::Filter(f) => f.head.take(),
            Kind::Merger(m) => {
                let sel = m.sel.take().expect("merger popped without selection");
                if m.policy == MergePolicy::RoundRobin {
                    m.next = (sel + 1) % m.inputs.len();
                }
                let input = m.inputs[sel];
                return self.pop(input);
            }
        }
        .expect("pop from an empty node")
    }

    /// Pops from the root, counting the line as served.
    pub fn pop_root(&mut self) -> Request {
        let root = self.root.expect("no root set");
        let r = self.pop(root);
        self.counters.served += 1;
        self.nodes[r.source.ix()].served += 1;
        r
    }

    fn ready_producer(&mut self, id: NodeId) -> bool {
        let now = self.now;
        let p = self.producer(id);
        if p.head.is_some() {
            return true;
        }
        if p.emitted >= p.spec.count.min(p.limit) || p.budget == 0 {
            return false;
        }
        let j = p.emitted;
        p.emitted += 1;
        p.budget -= 1;
        let mut callbacks = Callbacks::new();
        callbacks.push(Callback::new(p.spec.tag, p.spec.first_index + j, 1));
        p.head = Some(Request {
            addr: p.spec.address(j),
            bytes: p.spec.width,
            kind: p.spec.kind,
            stamp: now,
            source: id,
            callbacks,
        });
        self.counters.produced += 1;
        true
    }

    fn ready_filter(&mut self, id: NodeId) -> bool {
        let Kind::Filter(f) = &self.nodes[id.ix()].kind else {
            unreachable!()
        };
        if f.head.is_some() {
            return true;
        }
        let input = f.input;
        let always = |_: &Request| true;
        while self.ready(input, &always) {
            let r = self.pop(input);
            let Kind::Filter(f) = &mut self.nodes[id.ix()].kind else {
                unreachable!()
            };
            if (f.keep)(&r) {
                f.head = Some(r);
                return true;
            }
            self.counters.filtered += 1;
            self.instant.extend(r.callbacks);
        }
        false
    }

    fn ready_buffer(&mut self, id: NodeId) -> bool {
        let Kind::Buffer(b) = &self.nodes[id.ix()].kind else {
            unreachable!()
        };
        if !b.out.is_empty() {
            return true;
        }
        let input = b.input;
        let always = |_: &Request| true;
        loop {
            if !self.ready(input, &always) {
                let finished = self.finished(input);
                let Kind::Buffer(b) = &mut self.nodes[id.ix()].kind else {
                    unreachable!()
                };
                if finished || b.flush {
                    b.flush = false;
                    if let Some(h) = b.held.take() {
                        b.out.push_back(h);
                    }
                }
                return !b.out.is_empty();
            }
            let line = self.head(input).line();
            let Kind::Buffer(b) = &self.nodes[id.ix()].kind else {
                unreachable!()
            };
            if let Some(h) = &b.held {
                if h.line() != line {
                    let Kind::Buffer(b) = &mut self.nodes[id.ix()].kind else {
                        unreachable!()
                    };
                    let h = b.held.take().unwrap();
                    b.out.push_back(h);
                    return true;
                }
            }
            let r = self.pop(input);
            self.absorb(id, r);
            let Kind::Buffer(b) = &self.nodes[id.ix()].kind else {
                unreachable!()
            };
            if !b.out.is_empty() {
                return true;
            }
        }
    }

    // Folds one element into the held line, splitting it if it spans lines.
    fn absorb(&mut self, id: NodeId, r: Request) {
        let (first, last) = (r.line(), r.last_line());
        let Kind::Buffer(b) = &mut self.nodes[id.ix()].kind else {
            unreachable!()
        };
        for line in first..=last {
            let cbs: &[Callback] = if line == last { &r.callbacks } else { &[] };
            match &mut b.held {
                Some(h) if h.line() == line => {
                    for &cb in cbs {
                        push_callback(&mut h.callbacks, cb);
                    }
                    self.counters.coalesced += 1;
                }
                held => {
                    if let Some(h) = held.take() {
                        b.out.push_back(h);
                    }
                    if line != first {
                        self.counters.split_extra += 1;
                    }
                    *held = Some(Request {
                        addr: line * LINE_BYTES,
                        bytes: LINE_BYTES as u32,
                        kind: r.kind,
                        stamp: r.stamp,
                        source: r.source,
                        callbacks: cbs.iter().copied().collect(),
                    });
                }
            }
        }
    }

    fn ready_merger(&mut self, id: NodeId, accept: &dyn Fn(&Request) -> bool) -> bool {
        let Kind::Merger(m) = &self.nodes[id.ix()].kind else {
            unreachable!()
        };
        let (policy, n, start) = (m.policy, m.inputs.len(), m.next);
        let mut chosen = None;
        match policy {
            MergePolicy::RoundRobin => {
                for k in 0..n {
                    let slot = (start + k) % n;
                    let input = self.merger_input(id, slot);
                    if self.ready(input, accept) && accept(self.head(input)) {
                        chosen = Some(slot);
                        break;
                    }
                }
            }
            MergePolicy::Priority => {
                for slot in 0..n {
                    let input = self.merger_input(id, slot);
                    if self.ready(input, accept) {
                        if accept(self.head(input)) {
                            chosen = Some(slot);
                        }
                        break;
                    }
                }
            }
            MergePolicy::Direct => {
                let mut best: Option<(u64, usize)> = None;
                for slot in 0..n {
                    let input = self.merger_input(id, slot);
                    if self.ready(input, accept) {
                        let stamp = self.head(input).stamp;
                        if best.map_or(true, |(s, _)| stamp < s) {
                            best = Some((stamp, slot));
                        }
                    }
                }
                if let Some((_, slot)) = best {
                    let input = self.merger_input(id, slot);
                    if accept(self.head(input)) {
                        chosen = Some(slot);
                    }
                }
            }
        }
        let Kind::Merger(m) = &mut self.nodes[id.ix()].kind else {
            unreachable!()
        };
        m.sel = chosen;
        chosen.is_some()
    }

    fn merger_input(&self, id: NodeId, slot: usize) -> NodeId {
        let Kind::Merger(m) = &self.nodes[id.ix()].kind else {
            unreachable!()
        };
        m.inputs[slot]
    }
}

fn node_empty(kind: &Kind) -> bool {
    match kind {
        Kind::Producer(p) => p.head.is_none() && p.emitted >= p.spec.count,
        Kind::Queue(q) => q.items.is_empty(),
        Kind::Buffer(b) => b.held.is_none() && b.out.is_empty(),
        Kind::Filter(f) => f.head.is_none(),
        Kind::Merger(_) => true,
    }
}
