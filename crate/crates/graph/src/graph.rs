/// Dense vertex identifier in `[0, n)`.
pub type VertexId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: u32,
}

impl Edge {
    pub const fn new(src: VertexId, dst: VertexId) -> Self {
        Edge { src, dst, weight: 1 }
    }

    pub const fn weighted(src: VertexId, dst: VertexId, weight: u32) -> Self {
        Edge { src, dst, weight }
    }
}

/// A directed multigraph with an ordered edge list.
///
/// Undirected datasets are represented by storing both directions of every
/// edge, which is what the directed processing engines operate on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    weighted: bool,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Panics if an edge references a vertex outside `[0, n)`.
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Self {
        if let Some(e) = edges.iter().find(|e| e.src as usize >= n || e.dst as usize >= n) {
            panic!("edge {}->{} out of range for n = {n}", e.src, e.dst);
        }
        let weighted = edges.iter().any(|e| e.weight != 1);
        Graph {
            n,
            directed: true,
            weighted,
            edges,
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(VertexId, VertexId)]) -> Self {
        Self::from_edges(n, pairs.iter().map(|&(s, d)| Edge::new(s, d)).collect())
    }

    pub fn with_directed(mut self, directed: bool) -> Self {
        self.directed = directed;
        self
    }

    /// Marks the graph as carrying edge weights, which changes the edge
    /// record size used by edge-list layouts.
    pub fn with_weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for e in &self.edges {
            deg[e.src as usize] += 1;
        }
        deg
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for e in &self.edges {
            deg[e.dst as usize] += 1;
        }
        deg
    }

    /// Out-neighbors of `v` by linear scan. Intended for small graphs and tests.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.edges.iter().filter(move |e| e.src == v).map(|e| e.dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(g.out_degrees(), vec![2, 1, 0]);
        assert_eq!(g.in_degrees(), vec![0, 1, 2]);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1, 2]);
        assert!(!g.is_weighted());
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rejects_out_of_range_edges() {
        Graph::from_pairs(2, &[(0, 2)]);
    }
}
