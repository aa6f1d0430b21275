//! Functional reference solvers. These are plain in-memory iterations over
//! an adjacency index and serve as the oracle for the accelerator models.

use crate::{partition_count, Graph, GraphError, PrFormula, Problem, ProblemSpec, Result, Values};

/// Update visibility within one sweep over the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Every sweep reads only values of the previous sweep (edge-centric
    /// scatter/gather).
    Synchronous,
    /// Updates are applied immediately, sweeping source partitions of size
    /// `k` in ascending order and destinations in ascending order within a
    /// partition (vertex-centric pull).
    InPlace { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Values,
    /// Sweeps executed, including the final sweep that changed nothing.
    /// Stationary problems always report `max_iterations`.
    pub iterations: u32,
}

/// (destination, source, weight) triples grouped by source partition and
/// ordered by destination within a group.
fn pull_order(graph: &Graph, k: usize) -> Vec<Vec<(u32, u32, u32)>> {
    let parts = partition_count(graph.n(), k).max(1);
    let mut groups = vec![Vec::new(); parts];
    for e in graph.edges() {
        groups[e.src as usize / k].push((e.dst, e.src, e.weight));
    }
    for g in &mut groups {
        g.sort_by_key(|t| t.0);
    }
    groups
}

pub fn reference_solve(graph: &Graph, spec: &ProblemSpec, mode: SolveMode) -> Result<Solution> {
    spec.validate(graph.n())?;
    if let SolveMode::InPlace { k: 0 } = mode {
        return Err(GraphError::InvalidSpec("partition size 0".into()));
    }
    if spec.problem.is_stationary() {
        Ok(solve_stationary(graph, spec))
    } else {
        solve_min(graph, spec, mode)
    }
}

fn solve_min(graph: &Graph, spec: &ProblemSpec, mode: SolveMode) -> Result<Solution> {
    let n = graph.n();
    let unreached = spec.unreached();
    let mut values: Vec<u32> = match spec.problem {
        Problem::Wcc => (0..n as u32).collect(),
        _ => {
            let mut v = vec![unreached; n];
            v[spec.root.expect("validated") as usize] = 0;
            v
        }
    };
    let candidate = |from: u32, weight: u32| -> Result<Option<u32>> {
        let next = match spec.problem {
            Problem::Wcc => return Ok(Some(from)),
            _ if from == unreached => return Ok(None),
            Problem::Bfs => from as u64 + 1,
            _ => from as u64 + weight as u64,
        };
        if next >= unreached as u64 {
            return Err(GraphError::ValueOverflow {
                bits: spec.value_bits,
                distance: next,
            });
        }
        Ok(Some(next as u32))
    };

    let mut iterations = 0;
    match mode {
        SolveMode::Synchronous => loop {
            iterations += 1;
            let old = values.clone();
            for e in graph.edges() {
                if let Some(c) = candidate(old[e.src as usize], e.weight)? {
                    let slot = &mut values[e.dst as usize];
                    *slot = (*slot).min(c);
                }
            }
            if old == values {
                break;
            }
        },
        SolveMode::InPlace { k } => {
            let order = pull_order(graph, k);
            loop {
                iterations += 1;
                let mut changed = false;
                for group in &order {
                    for &(dst, src, w) in group {
                        if let Some(c) = candidate(values[src as usize], w)? {
                            if c < values[dst as usize] {
                                values[dst as usize] = c;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
    }
    Ok(Solution {
        values: Values::Discrete(values),
        iterations,
    })
}

fn solve_stationary(graph: &Graph, spec: &ProblemSpec) -> Solution {
    let n = graph.n();
    let out = graph.out_degrees();
    let mut x = vec![spec.initial_real(n); n];
    let base = (1.0 - spec.damping) / n as f64;
    for _ in 0..spec.max_iterations {
        let mut sum = vec![0.0f64; n];
        for e in graph.edges() {
            let u = e.src as usize;
            sum[e.dst as usize] += match spec.problem {
                Problem::Spmv => e.weight as f64 * x[u],
                _ => x[u] / out[u] as f64,
            };
        }
        x = match spec.problem {
            Problem::Spmv => sum,
            _ => {
                let scale = match spec.pr_formula {
                    PrFormula::Standard => spec.damping,
                    PrFormula::Undamped => 1.0,
                };
                sum.into_iter().map(|s| base + scale * s).collect()
            }
        };
    }
    Solution {
        values: Values::Real(x),
        iterations: spec.max_iterations,
    }
}
