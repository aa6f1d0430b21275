//! Small deterministic graphs for tests and examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Edge, Graph};

/// Six-vertex example graph used throughout the docs and tests.
///
/// With `k = 3` partition 0 holds `e0..e4` and partition 1 holds `e5..e8`;
/// `e0 = (v0, v1)`, `e2 = (v0, v5)`, and in the inverted CSR of partition 1
/// the neighbors of `v5` occupy slots `[2, 4)` = `{v3, v4}`.
pub fn example_graph() -> Graph {
    Graph::from_pairs(
        6,
        &[(0, 1), (0, 2), (0, 5), (1, 3), (2, 4), (3, 4), (3, 5), (4, 5), (5, 0)],
    )
}

/// `m` edges with endpoints drawn uniformly from `[0, n)`.
pub fn uniform(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..m)
        .map(|_| Edge::new(rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
        .collect();
    Graph::from_edges(n, edges)
}

/// Skewed graph from recursive quadrant sampling (R-MAT parameters
/// 0.57/0.19/0.19/0.05), folded onto `[0, n)`.
pub fn skewed(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = usize::BITS - (n.max(2) - 1).leading_zeros();
    let edges = (0..m)
        .map(|_| {
            let (mut s, mut d) = (0u64, 0u64);
            for _ in 0..levels {
                let r: f64 = rng.gen();
                let (bs, bd) = match r {
                    r if r < 0.57 => (0, 0),
                    r if r < 0.76 => (0, 1),
                    r if r < 0.95 => (1, 0),
                    _ => (1, 1),
                };
                s = s << 1 | bs;
                d = d << 1 | bd;
            }
            Edge::new((s % n as u64) as u32, (d % n as u64) as u32)
        })
        .collect();
    Graph::from_edges(n, edges)
}

/// Stores every edge of `g` in both directions.
pub fn symmetrize(g: &Graph) -> Graph {
    let mut edges = Vec::with_capacity(g.m() * 2);
    for e in g.edges() {
        edges.push(*e);
        edges.push(Edge::weighted(e.dst, e.src, e.weight));
    }
    Graph::from_edges(g.n(), edges).with_directed(false)
}

/// Path `0 -> 1 -> ... -> n-1`.
pub fn chain(n: usize) -> Graph {
    let pairs: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
    Graph::from_pairs(n, &pairs)
}

/// Integer weights in `[1, max]` on a copy of `g`.
pub fn with_random_weights(g: &Graph, max: u32, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge::weighted(e.src, e.dst, rng.gen_range(1..=max)))
        .collect();
    Graph::from_edges(g.n(), edges).with_weighted(true)
}

/// Copy of `g` with vertex ids randomly permuted. R-MAT sampling biases the
/// low id bits towards zero; real datasets do not.
pub fn shuffle_ids(g: &Graph, seed: u64) -> Graph {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..g.n() as u32).collect();
    perm.shuffle(&mut rng);
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge::weighted(perm[e.src as usize], perm[e.dst as usize], e.weight))
        .collect();
    Graph::from_edges(g.n(), edges)
        .with_directed(g.is_directed())
        .with_weighted(g.is_weighted())
}
