//! Scaled synthetic graphs standing in for datasets whose files are not
//! available. Each keeps its dataset's average degree and directedness.

use gpasim_graph::fixtures::{shuffle_ids, skewed, symmetrize};
use gpasim_graph::{Edge, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Dataset;

/// Stand-ins get at most this many edges unless asked otherwise.
pub const DESK_EDGES: usize = 1_000_000;

/// A graph shaped like `ds`, scaled down so it has at most `max_edges`
/// edges. Road networks become sparse lattices, everything else skewed.
pub fn stand_in(ds: &Dataset, max_edges: usize, seed: u64) -> Graph {
    let stored = ds.n as f64 * ds.avg_degree;
    let scale = (max_edges as f64 / stored).min(1.0);
    let n = ((ds.n as f64 * scale).round() as usize).max(16);
    let m = (n as f64 * ds.avg_degree).round() as usize;
    let g = if ds.key == "rd" {
        lattice(n, ds.avg_degree, seed)
    } else if ds.duplicate {
        symmetrize(&skewed(n, m / 2, seed))
    } else {
        skewed(n, m, seed)
    };
    shuffle_ids(&g, seed ^ 0x5eed)
}

/// Label used for a stand-in's results, e.g. `syn-sd`.
pub fn label(ds: &Dataset) -> String {
    format!("syn-{}", ds.key)
}

/// Square grid with both directions of each lattice link, links kept with
/// the probability that yields `avg_degree`.
fn lattice(n: usize, avg_degree: f64, seed: u64) -> Graph {
    let side = (n as f64).sqrt().ceil() as usize;
    let keep = (avg_degree / 4.0).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 0..n {
        let (r, c) = (v / side, v % side);
        let right = (c + 1 < side && v + 1 < n).then_some(v + 1);
        let down = (r + 1 < side && v + side < n).then_some(v + side);
        for u in [right, down].into_iter().flatten() {
            if rng.gen::<f64>() < keep {
                edges.push(Edge::new(v as u32, u as u32));
                edges.push(Edge::new(u as u32, v as u32));
            }
        }
    }
    Graph::from_edges(n, edges).with_directed(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset;

    #[test]
    fn keeps_average_degree() {
        for key in ["sd", "db", "wt", "rd", "bk"] {
            let ds = dataset(key).unwrap();
            let g = stand_in(ds, 200_000, 1);
            let avg = g.m() as f64 / g.n() as f64;
            assert!((avg - ds.avg_degree).abs() / ds.avg_degree < 0.05, "{key}: {avg}");
            assert!(g.m() <= 210_000);
            assert_eq!(g.is_directed(), !(ds.duplicate || key == "rd"));
        }
    }

    #[test]
    fn deterministic() {
        let ds = dataset("yt").unwrap();
        assert_eq!(stand_in(ds, 50_000, 3).edges(), stand_in(ds, 50_000, 3).edges());
    }
}
