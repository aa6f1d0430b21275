//! Published measurements: wall-clock seconds for HitGraph, GREPS for
//! AccuGraph. `ground_truth` is the hardware measurement and `simulation`
//! the reference simulator's figure.

use gpasim_graph::Problem;
use serde::Serialize;

use crate::Accelerator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Seconds,
    Greps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthEntry {
    pub accelerator: Accelerator,
    #[serde(serialize_with = "crate::problem_serde::serialize")]
    pub problem: Problem,
    pub graph: &'static str,
    pub ground_truth: f64,
    pub simulation: f64,
    pub unit: Unit,
}

const HIT_GRAPHS: [&str; 7] = ["bk", "wt", "rd", "lj", "tw", "r21", "r24"];

const HIT_ROWS: [(Problem, [f64; 7], [f64; 7]); 4] = [
    (
        Problem::Spmv,
        [0.0032, 0.0050, 0.0028, 0.0362, 0.6525, 0.0567, 0.1435],
        [0.0026, 0.0066, 0.0027, 0.0411, 0.8184, 0.0484, 0.0770],
    ),
    (
        Problem::PageRank,
        [0.0030, 0.0045, 0.0027, 0.0327, 0.5904, 0.0534, 0.1403],
        [0.0026, 0.0066, 0.0027, 0.0411, 0.8184, 0.0484, 0.0770],
    ),
    (
        Problem::Sssp,
        [0.7824, 0.0255, 1.1133, 0.5921, 5.5768, 0.9671, 0.9213],
        [1.2554, 0.0027, 1.3436, 0.3872, 6.2380, 0.0725, 0.1111],
    ),
    (
        Problem::Wcc,
        [1.7690, 0.0460, 1.4800, 0.4130, 6.6170, 0.4500, 1.1080],
        [1.8578, 0.0461, 1.4526, 0.4694, 9.4139, 0.4653, 0.9307],
    ),
];

const ACCU_GRAPHS: [&str; 6] = ["sd", "db", "yt", "wt", "lj", "or"];

const ACCU_ROWS: [(Problem, [f64; 6], [f64; 6]); 3] = [
    (
        Problem::Bfs,
        [2.867, 2.397, 1.899, 1.653, 3.370, 3.638],
        [2.880, 2.515, 2.530, 1.999, 2.946, 3.192],
    ),
    (
        Problem::PageRank,
        [2.242, 1.931, 1.560, 1.318, 1.921, 2.587],
        [2.518, 1.944, 1.978, 1.283, 1.926, 2.920],
    ),
    (
        Problem::Wcc,
        [2.950, 2.468, 1.954, 1.729, 2.407, 3.365],
        [2.634, 2.183, 2.284, 1.532, 2.254, 2.998],
    ),
];

#[derive(Debug, Clone)]
pub struct GroundTruthTable {
    entries: Vec<TruthEntry>,
}

impl Default for GroundTruthTable {
    fn default() -> Self {
        let mut entries = Vec::new();
        for (problem, gt, sim) in HIT_ROWS {
            for (i, graph) in HIT_GRAPHS.iter().enumerate() {
                entries.push(TruthEntry {
                    accelerator: Accelerator::HitGraph,
                    problem,
                    graph,
                    ground_truth: gt[i],
                    simulation: sim[i],
                    unit: Unit::Seconds,
                });
            }
        }
        for (problem, gt, sim) in ACCU_ROWS {
            for (i, graph) in ACCU_GRAPHS.iter().enumerate() {
                entries.push(TruthEntry {
                    accelerator: Accelerator::AccuGraph,
                    problem,
                    graph,
                    ground_truth: gt[i],
                    simulation: sim[i],
                    unit: Unit::Greps,
                });
            }
        }
        GroundTruthTable { entries }
    }
}

impl GroundTruthTable {
    pub fn entries(&self) -> &[TruthEntry] {
        &self.entries
    }

    pub fn lookup(&self, accelerator: Accelerator, problem: Problem, graph: &str) -> Option<&TruthEntry> {
        self.entries
            .iter()
            .find(|e| e.accelerator == accelerator && e.problem == problem && e.graph == graph)
    }

    /// Mean error of the published simulation against the published
    /// measurements, skipping twitter and HitGraph SSSP.
    pub fn published_mean_error(&self) -> f64 {
        let errors: Vec<f64> = self
            .entries
            .iter()
            .filter(|e| e.graph != "tw" && !(e.accelerator == Accelerator::HitGraph && e.problem == Problem::Sssp))
            .map(|e| crate::percentage_error(e.simulation, e.ground_truth))
            .collect();
        errors.iter().sum::<f64>() / errors.len() as f64
    }
}
