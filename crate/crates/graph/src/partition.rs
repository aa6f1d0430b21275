//! Horizontal partitioning: the vertex set is cut into intervals of `k`
//! vertices and every edge belongs to the interval holding its source.

use crate::{Edge, Graph, VertexId};

/// Half-open vertex interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: VertexId,
    pub hi: VertexId,
}

impl Interval {
    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.lo <= v && v < self.hi
    }
}

/// `ceil(n / k)`; panics on `k == 0`.
pub fn partition_count(n: usize, k: usize) -> usize {
    assert!(k >= 1, "partition size must be at least 1");
    n.div_ceil(k)
}

fn interval(n: usize, k: usize, p: usize) -> Interval {
    let lo = p * k;
    let hi = ((p + 1) * k).min(n);
    Interval {
        lo: lo as VertexId,
        hi: hi as VertexId,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListPartitions {
    n: usize,
    k: usize,
    weighted: bool,
    dst_sorted: bool,
    parts: Vec<Vec<Edge>>,
}

impl EdgeListPartitions {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> usize {
        self.parts.len()
    }

    pub fn m(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn is_dst_sorted(&self) -> bool {
        self.dst_sorted
    }

    pub fn edges(&self, p: usize) -> &[Edge] {
        &self.parts[p]
    }

    pub fn partitions(&self) -> impl Iterator<Item = &[Edge]> {
        self.parts.iter().map(Vec::as_slice)
    }

    pub fn interval(&self, p: usize) -> Interval {
        interval(self.n, self.k, p)
    }

    pub fn partition_of(&self, v: VertexId) -> usize {
        v as usize / self.k
    }
}

/// Assigns every edge to partition `floor(src / k)`, keeping input order
/// within a partition.
pub fn partition_edge_list(graph: &Graph, k: usize) -> EdgeListPartitions {
    let count = partition_count(graph.n(), k);
    let mut sizes = vec![0usize; count];
    for e in graph.edges() {
        sizes[e.src as usize / k] += 1;
    }
    let mut parts: Vec<Vec<Edge>> = sizes.into_iter().map(Vec::with_capacity).collect();
    for e in graph.edges() {
        parts[e.src as usize / k].push(*e);
    }
    EdgeListPartitions {
        n: graph.n(),
        k,
        weighted: graph.is_weighted(),
        dst_sorted: false,
        parts,
    }
}

/// Stable sort of each partition by destination vertex.
pub fn sort_partition_edges_by_destination(mut parts: EdgeListPartitions) -> EdgeListPartitions {
    for p in &mut parts.parts {
        p.sort_by_key(|e| e.dst);
    }
    parts.dst_sorted = true;
    parts
}

/// One partition of the inverted CSR: for every vertex `v` of the whole
/// graph, `neighbors[pointers[v]..pointers[v + 1]]` are the sources `u` of
/// edges `u -> v` whose source lies in this partition's interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrPartition {
    pub pointers: Vec<u32>,
    pub neighbors: Vec<VertexId>,
}

impl CsrPartition {
    pub fn neighbors_of(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.pointers[v] as usize..self.pointers[v + 1] as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Destination vertex owning neighbor slot `e`.
    pub fn owner_of(&self, e: usize) -> VertexId {
        (self.pointers.partition_point(|&p| p as usize <= e) - 1) as VertexId
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrPartitions {
    n: usize,
    k: usize,
    parts: Vec<CsrPartition>,
}

impl CsrPartitions {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> usize {
        self.parts.len()
    }

    pub fn m(&self) -> usize {
        self.parts.iter().map(CsrPartition::edge_count).sum()
    }

    pub fn part(&self, p: usize) -> &CsrPartition {
        &self.parts[p]
    }

    pub fn interval(&self, p: usize) -> Interval {
        interval(self.n, self.k, p)
    }

    pub fn partition_of(&self, v: VertexId) -> usize {
        v as usize / self.k
    }
}

/// Builds the partitioned CSR of the inverted edges with a counting sort;
/// neighbor order within a vertex follows the input edge order.
pub fn build_partitioned_csr(graph: &Graph, k: usize) -> CsrPartitions {
    let n = graph.n();
    let count = partition_count(n, k);
    let mut parts = Vec::with_capacity(count);
    let mut by_part: Vec<Vec<Edge>> = vec![Vec::new(); count];
    for e in graph.edges() {
        by_part[e.src as usize / k].push(*e);
    }
    for edges in by_part {
        let mut pointers = vec![0u32; n + 1];
        for e in &edges {
            pointers[e.dst as usize + 1] += 1;
        }
        for v in 0..n {
            pointers[v + 1] += pointers[v];
        }
        let mut fill = pointers.clone();
        let mut neighbors = vec![0; edges.len()];
        for e in &edges {
            let slot = &mut fill[e.dst as usize];
            neighbors[*slot as usize] = e.src;
            *slot += 1;
        }
        parts.push(CsrPartition { pointers, neighbors });
    }
    CsrPartitions { n, k, parts }
}
