//! Memory, data-type and accelerator parameters of the two evaluation
//! setups: `Reproduction` mirrors each accelerator's own article, and
//! `Comparability` puts both on the same single DDR4 channel.

use std::fmt;
use std::str::FromStr;

use gpasim_accel::{AccuGraphParams, HitGraphParams};
use gpasim_dram::{DramConfig, Standard};
use gpasim_graph::{Problem, ProblemSpec, VertexId};
use serde::{Deserialize, Serialize};

use crate::{Accelerator, BenchError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Reproduction,
    Comparability,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Reproduction => "reproduction",
            Profile::Comparability => "comparability",
        })
    }
}

impl FromStr for Profile {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "reproduction" => Ok(Profile::Reproduction),
            "comparability" => Ok(Profile::Comparability),
            _ => Err(BenchError::Config(format!("unknown profile {s:?}"))),
        }
    }
}

/// Vertices per partition AccuGraph uses for PR/WCC on the two graphs
/// whose value arrays exceed BRAM.
pub const ACCUGRAPH_LARGE_K: usize = 1_700_000;

pub fn dram_config(accel: Accelerator, profile: Profile) -> DramConfig {
    match (accel, profile) {
        (Accelerator::HitGraph, Profile::Reproduction) => DramConfig::new(Standard::Ddr3, 4, 2, "1600K", "8Gb_x16"),
        (Accelerator::AccuGraph, Profile::Reproduction) => DramConfig::new(Standard::Ddr4, 1, 1, "2400R", "4Gb_x16"),
        (_, Profile::Comparability) => DramConfig::new(Standard::Ddr4, 1, 1, "2400R", "8Gb_x16"),
    }
}

pub fn hitgraph_params(profile: Profile) -> HitGraphParams {
    match profile {
        Profile::Reproduction => HitGraphParams::default(),
        Profile::Comparability => HitGraphParams {
            pes: 1,
            pipelines: 16,
            partition_size: 1_024_000,
            ..HitGraphParams::default()
        },
    }
}

pub fn accugraph_params(profile: Profile, problem: Problem, dataset: &str) -> AccuGraphParams {
    let split = profile == Profile::Reproduction
        && matches!(problem, Problem::PageRank | Problem::Wcc)
        && matches!(dataset, "lj" | "live-journal" | "or" | "orkut");
    AccuGraphParams {
        partition_size: split.then_some(ACCUGRAPH_LARGE_K),
        ..AccuGraphParams::default()
    }
}

/// HitGraph reads weighted edge records in its own setup.
pub fn weighted(accel: Accelerator, profile: Profile) -> bool {
    accel == Accelerator::HitGraph && profile == Profile::Reproduction
}

pub fn check_supported(accel: Accelerator, profile: Profile, problem: Problem) -> Result<(), BenchError> {
    let ok = match (accel, profile) {
        (Accelerator::HitGraph, Profile::Reproduction) => problem != Problem::Bfs,
        (Accelerator::AccuGraph, Profile::Reproduction) => {
            matches!(problem, Problem::Bfs | Problem::PageRank | Problem::Wcc)
        }
        (_, Profile::Comparability) => problem != Problem::Spmv,
    };
    if ok {
        Ok(())
    } else {
        Err(BenchError::Config(format!(
            "{accel} {profile} profile does not run {problem}"
        )))
    }
}

pub fn problem_spec(
    accel: Accelerator,
    profile: Profile,
    problem: Problem,
    root: Option<VertexId>,
    iterations: u32,
) -> ProblemSpec {
    let mut s = ProblemSpec::new(problem);
    if let Some(r) = root {
        s = s.with_root(r);
    }
    if problem.is_stationary() {
        s = s.with_iterations(iterations);
    }
    if accel == Accelerator::AccuGraph && profile == Profile::Reproduction && problem == Problem::Bfs {
        s = s.with_value_bits(8);
    }
    s
}
