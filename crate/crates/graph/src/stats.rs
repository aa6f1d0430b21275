use std::collections::BTreeMap;

use crate::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    /// Stored edges per vertex, `m / n`.
    pub avg_degree: f64,
    /// Out-degree -> number of vertices with that degree.
    pub degree_histogram: BTreeMap<u32, usize>,
}

pub fn graph_stats(graph: &Graph) -> GraphStats {
    let mut degree_histogram = BTreeMap::new();
    for d in graph.out_degrees() {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    GraphStats {
        n: graph.n(),
        m: graph.m(),
        avg_degree: if graph.n() == 0 {
            0.0
        } else {
            graph.m() as f64 / graph.n() as f64
        },
        degree_histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]);
        let s = graph_stats(&g);
        assert_eq!((s.n, s.m), (3, 3));
        assert_eq!(s.avg_degree, 1.0);
        assert_eq!(s.degree_histogram.get(&1), Some(&3));
    }
}
