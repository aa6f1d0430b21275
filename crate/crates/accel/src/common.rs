use gpasim_dram::DramError;
use gpasim_flow::{FlowError, SimResult};
use gpasim_graph::{GraphError, Problem, ProblemSpec, Values};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum AccelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Dram(#[from] DramError),
    #[error("invalid accelerator parameters: {0}")]
    Params(String),
    #[error("{accel} does not support {problem}")]
    Unsupported { accel: &'static str, problem: Problem },
    #[error("channel {channel} needs {needed} bytes but holds {capacity}")]
    Layout { channel: u32, needed: u64, capacity: u64 },
}

/// Model-level counters that are not visible in the DRAM statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    /// Update records written (HitGraph) or destination values changed (AccuGraph).
    pub updates: u64,
    pub value_writes: u64,
    pub partitions_run: u64,
    pub partitions_skipped: u64,
    pub prefetches_skipped: u64,
    /// Cycles neighbor values waited for a busy BRAM bank, summed.
    pub bank_stall_cycles: u64,
    /// Edges actually read from memory, summed over iterations.
    pub edges_read: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub sim: SimResult,
    pub values: Values,
    pub stats: ModelStats,
}

pub(crate) fn align(x: u64) -> u64 {
    x.div_ceil(64) * 64
}

/// Label-propagation candidate sent from a vertex holding `from` along an
/// edge of weight `w`. `None` for unreached sources.
pub(crate) fn min_candidate(spec: &ProblemSpec, from: u32, w: u32) -> Result<Option<u32>, GraphError> {
    let unreached = spec.unreached();
    let next = match spec.problem {
        Problem::Wcc => return Ok(Some(from)),
        _ if from == unreached => return Ok(None),
        Problem::Bfs => from as u64 + 1,
        _ => from as u64 + w as u64,
    };
    if next >= unreached as u64 {
        return Err(GraphError::ValueOverflow {
            bits: spec.value_bits,
            distance: next,
        });
    }
    Ok(Some(next as u32))
}

pub(crate) fn initial_discrete(spec: &ProblemSpec, n: usize) -> Vec<u32> {
    match spec.problem {
        Problem::Wcc => (0..n as u32).collect(),
        _ => {
            let mut v = vec![spec.unreached(); n];
            v[spec.root.expect("validated") as usize] = 0;
            v
        }
    }
}

/// `(base, scale)` such that a vertex's new value is `base + scale * sum`.
pub(crate) fn sum_affine(spec: &ProblemSpec, n: usize) -> (f64, f64) {
    match spec.problem {
        Problem::Spmv => (0.0, 1.0),
        _ => {
            let scale = match spec.pr_formula {
                gpasim_graph::PrFormula::Standard => spec.damping,
                gpasim_graph::PrFormula::Undamped => 1.0,
            };
            ((1.0 - spec.damping) / n as f64, scale)
        }
    }
}
