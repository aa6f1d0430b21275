//! Experiment plumbing around the accelerator models: dataset registry,
//! per-accelerator profiles, published reference numbers, metrics,
//! result emission and the reproduction, comparability and optimization
//! suites behind the `gpasim` binary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod datasets;
mod experiment;
mod metrics;
mod output;
pub mod profiles;
pub mod suites;
pub mod synthetic;
mod truth;

pub use datasets::{data_dir, dataset, Dataset, DATASETS};
pub use experiment::{run_experiment, run_on_graph, simulate, ExperimentConfig, RootsPolicy, RunRecord, Summary};
pub use metrics::{coefficient_of_variation, compute_reps, mean, percentage_error};
pub use output::{emit_plot_data, emit_results, emit_rows, read_results, Format, PlotPoint};
pub use profiles::Profile;
pub use truth::{GroundTruthTable, TruthEntry, Unit};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Accel(#[from] gpasim_accel::AccelError),
    #[error(transparent)]
    Graph(#[from] gpasim_graph::GraphError),
    #[error(transparent)]
    Dram(#[from] gpasim_dram::DramError),
    #[error("dataset {name} not found at {path}")]
    MissingDataset { name: String, path: std::path::PathBuf },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accelerator {
    HitGraph,
    AccuGraph,
}

impl fmt::Display for Accelerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Accelerator::HitGraph => "hitgraph",
            Accelerator::AccuGraph => "accugraph",
        })
    }
}

impl FromStr for Accelerator {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.to_ascii_lowercase().as_str() {
            "hitgraph" => Ok(Accelerator::HitGraph),
            "accugraph" => Ok(Accelerator::AccuGraph),
            _ => Err(BenchError::Config(format!("unknown accelerator {s:?}"))),
        }
    }
}

/// `Problem` as its short name (`bfs`, `pr`, ...).
pub(crate) mod problem_serde {
    use gpasim_graph::Problem;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Problem, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(p.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Problem, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
