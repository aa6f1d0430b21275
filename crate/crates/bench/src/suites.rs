//! The three studies: reproduction of the published simulation numbers,
//! HitGraph vs AccuGraph on one memory configuration, and AccuGraph's
//! prefetch and partition skipping.

use std::path::PathBuf;

use gpasim_accel::{AccuGraphParams, HitGraphParams, ModelStats};
use gpasim_graph::{Graph, Problem, PAPER_ROOT_SEED};
use serde::Serialize;

use crate::experiment::run_with_stats;
use crate::synthetic::{label, stand_in, DESK_EDGES};
use crate::truth::{GroundTruthTable, Unit};
use crate::{
    percentage_error, profiles, run_on_graph, Accelerator, BenchError, Dataset, ExperimentConfig, Profile, RootsPolicy,
    Summary, DATASETS,
};

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// Include live-journal, orkut, twitter and the R-MAT graphs.
    pub large: bool,
    /// Use synthetic stand-ins even when dataset files exist.
    pub synthetic: bool,
    /// Edge budget for stand-ins.
    pub max_edges: usize,
    /// Roots per BFS/SSSP experiment.
    pub roots: usize,
    /// Directory for DRAM command traces.
    pub trace: Option<PathBuf>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            large: false,
            synthetic: false,
            max_edges: DESK_EDGES,
            roots: 20,
            trace: None,
        }
    }
}

impl SuiteOptions {
    fn roots(&self) -> RootsPolicy {
        RootsPolicy::Mt19937 {
            seed: PAPER_ROOT_SEED,
            count: self.roots,
        }
    }

    fn wants(&self, ds: &Dataset) -> bool {
        self.large || !ds.large
    }
}

/// A dataset loaded from disk, or its stand-in when the file is missing.
pub struct SuiteGraph {
    pub dataset: &'static Dataset,
    pub graph: Graph,
    pub label: String,
    pub stand_in: bool,
}

impl SuiteGraph {
    pub fn load(ds: &'static Dataset, weighted: bool, opts: &SuiteOptions) -> Result<Self, BenchError> {
        if !opts.synthetic && ds.locate().is_some() {
            return Ok(SuiteGraph {
                dataset: ds,
                graph: ds.load(weighted)?,
                label: ds.key.to_string(),
                stand_in: false,
            });
        }
        let graph = stand_in(ds, opts.max_edges, 1).with_weighted(weighted);
        Ok(SuiteGraph {
            dataset: ds,
            graph,
            label: label(ds),
            stand_in: true,
        })
    }

    /// Vertex count relative to the real dataset.
    pub fn scale(&self) -> f64 {
        if self.stand_in {
            self.graph.n() as f64 / self.dataset.n as f64
        } else {
            1.0
        }
    }

    // Partition sizes shrink with the graph so stand-ins keep the
    // partition count of the real dataset.
    fn scaled(&self, k: usize) -> usize {
        ((k as f64 * self.scale()).ceil() as usize).max(64)
    }

    fn hitgraph(&self, profile: Profile) -> HitGraphParams {
        let p = profiles::hitgraph_params(profile);
        HitGraphParams {
            partition_size: self.scaled(p.partition_size),
            ..p
        }
    }

    fn accugraph(&self, profile: Profile, problem: Problem) -> AccuGraphParams {
        let p = profiles::accugraph_params(profile, problem, self.dataset.key);
        AccuGraphParams {
            partition_size: p.partition_size.map(|k| self.scaled(k)),
            ..p
        }
    }

    fn config(&self, accel: Accelerator, profile: Profile, problem: Problem, opts: &SuiteOptions) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(accel, problem, self.dataset.key, profile);
        cfg.roots = opts.roots();
        cfg.hitgraph = Some(self.hitgraph(profile));
        cfg.accugraph = Some(self.accugraph(profile, problem));
        cfg.trace = opts
            .trace
            .as_ref()
            .map(|d| d.join(format!("{accel}-{problem}-{}.trace", self.label)));
        cfg
    }
}

fn mean_iterations(records: &[crate::RunRecord]) -> f64 {
    records.iter().map(|r| r.iterations as f64).sum::<f64>() / records.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproRow {
    pub accelerator: Accelerator,
    #[serde(serialize_with = "crate::problem_serde::serialize")]
    pub problem: Problem,
    pub graph: String,
    pub stand_in: bool,
    pub runs: usize,
    pub iterations: f64,
    pub cycles: f64,
    /// Accelerator cycles per edge read, independent of the clock.
    pub cycles_per_edge: f64,
    pub runtime_s: f64,
    pub cov: f64,
    pub greps: f64,
    pub unit: Unit,
    /// Runtime or GREPS, whichever the published table uses.
    pub measured: f64,
    pub ground_truth: f64,
    pub simulation: f64,
    /// Absent for stand-ins measured in seconds, which scale with size.
    pub error_vs_truth: Option<f64>,
    pub error_vs_simulation: Option<f64>,
}

/// Sweep counts to run for a reproduction row. AccuGraph's PR figure does
/// not say how many sweeps it covers, so both 1 and 10 are run.
pub fn repro_iterations(accel: Accelerator, problem: Problem) -> &'static [u32] {
    if accel == Accelerator::AccuGraph && problem == Problem::PageRank {
        &[1, 10]
    } else {
        &[1]
    }
}

pub fn reproduce(accel: Accelerator, opts: &SuiteOptions) -> Result<Vec<ReproRow>, BenchError> {
    let table = GroundTruthTable::default();
    let mut rows = Vec::new();
    for ds in DATASETS.iter().filter(|d| opts.wants(d)) {
        if !table
            .entries()
            .iter()
            .any(|e| e.accelerator == accel && e.graph == ds.key)
        {
            continue;
        }
        let sg = SuiteGraph::load(ds, profiles::weighted(accel, Profile::Reproduction), opts)?;
        rows.extend(reproduce_graph(accel, &sg, opts)?);
    }
    Ok(rows)
}

/// The published rows of `accel` for one graph.
pub fn reproduce_graph(accel: Accelerator, sg: &SuiteGraph, opts: &SuiteOptions) -> Result<Vec<ReproRow>, BenchError> {
    let table = GroundTruthTable::default();
    let mut rows = Vec::new();
    for e in table
        .entries()
        .iter()
        .filter(|e| e.accelerator == accel && e.graph == sg.dataset.key)
    {
        for &iters in repro_iterations(accel, e.problem) {
            let mut cfg = sg.config(accel, Profile::Reproduction, e.problem, opts);
            cfg.iterations = iters;
            let records = run_on_graph(&cfg, &sg.graph, &sg.label)?;
            let s = Summary::of(&records).expect("at least one run");
            let its = mean_iterations(&records);
            let cycles = records.iter().map(|r| r.cycles as f64).sum::<f64>() / records.len() as f64;
            let measured = match e.unit {
                Unit::Seconds => s.mean_runtime_s,
                Unit::Greps => s.mean_greps,
            };
            let comparable = !(sg.stand_in && e.unit == Unit::Seconds);
            rows.push(ReproRow {
                accelerator: accel,
                problem: e.problem,
                graph: sg.label.clone(),
                stand_in: sg.stand_in,
                runs: s.runs,
                iterations: its,
                cycles,
                cycles_per_edge: cycles / (sg.graph.m() as f64 * its),
                runtime_s: s.mean_runtime_s,
                cov: s.cov,
                greps: s.mean_greps,
                unit: e.unit,
                measured,
                ground_truth: e.ground_truth,
                simulation: e.simulation,
                error_vs_truth: comparable.then(|| percentage_error(measured, e.ground_truth)),
                error_vs_simulation: comparable.then(|| percentage_error(measured, e.simulation)),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    #[serde(serialize_with = "crate::problem_serde::serialize")]
    pub problem: Problem,
    pub graph: String,
    pub stand_in: bool,
    pub hitgraph_runtime_s: f64,
    pub accugraph_runtime_s: f64,
    pub hitgraph_iterations: f64,
    pub accugraph_iterations: f64,
    /// HitGraph runtime over AccuGraph runtime.
    pub factor: f64,
}

pub const COMPARE_PROBLEMS: [Problem; 4] = [Problem::Bfs, Problem::Sssp, Problem::PageRank, Problem::Wcc];

/// Both accelerators on `graph` under the comparability profile, with the
/// same roots. `partition_scale` shrinks HitGraph's partitions for
/// scaled-down graphs.
pub fn compare_graph(
    graph: &Graph,
    label: &str,
    problem: Problem,
    roots: &RootsPolicy,
    partition_scale: f64,
) -> Result<CompareRow, BenchError> {
    let runs = [Accelerator::HitGraph, Accelerator::AccuGraph].map(|accel| {
        let mut cfg = ExperimentConfig::new(accel, problem, label, Profile::Comparability);
        cfg.roots = roots.clone();
        let hp = profiles::hitgraph_params(Profile::Comparability);
        let k = ((hp.partition_size as f64 * partition_scale).ceil() as usize).max(64);
        cfg.hitgraph = Some(HitGraphParams {
            partition_size: k,
            ..hp
        });
        cfg
    });
    let [hit, accu] = runs;
    let h = run_on_graph(&hit, graph, label)?;
    let a = run_on_graph(&accu, graph, label)?;
    let (hs, as_) = (Summary::of(&h).expect("runs"), Summary::of(&a).expect("runs"));
    Ok(CompareRow {
        problem,
        graph: label.to_string(),
        stand_in: false,
        hitgraph_runtime_s: hs.mean_runtime_s,
        accugraph_runtime_s: as_.mean_runtime_s,
        hitgraph_iterations: mean_iterations(&h),
        accugraph_iterations: mean_iterations(&a),
        factor: hs.mean_runtime_s / as_.mean_runtime_s,
    })
}

pub fn comparability_suite(opts: &SuiteOptions, problems: &[Problem]) -> Result<Vec<CompareRow>, BenchError> {
    let mut rows = Vec::new();
    for ds in DATASETS.iter().filter(|d| opts.wants(d)) {
        let sg = SuiteGraph::load(ds, false, opts)?;
        for &problem in problems {
            let mut row = compare_graph(&sg.graph, &sg.label, problem, &opts.roots(), sg.scale())?;
            row.stand_in = sg.stand_in;
            rows.push(row);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptRow {
    #[serde(serialize_with = "crate::problem_serde::serialize")]
    pub problem: Problem,
    pub graph: String,
    pub stand_in: bool,
    pub partitions: usize,
    pub variant: &'static str,
    pub runtime_s: f64,
    pub partitions_skipped: u64,
    pub prefetches_skipped: u64,
    /// Baseline runtime over this variant's runtime.
    pub speedup: f64,
}

pub const OPT_VARIANTS: [(&str, bool, bool); 4] = [
    ("base", false, false),
    ("prefetch", true, false),
    ("partition", false, true),
    ("both", true, true),
];

/// All four skipping variants of AccuGraph on one graph and partitioning.
pub fn optimize_graph(
    graph: &Graph,
    label: &str,
    problem: Problem,
    partition_size: Option<usize>,
    roots: &RootsPolicy,
) -> Result<Vec<OptRow>, BenchError> {
    let base = AccuGraphParams {
        partition_size,
        ..AccuGraphParams::default()
    };
    let k = base.effective_k(graph.n());
    let mut rows = Vec::new();
    let mut base_runtime = f64::NAN;
    for (variant, prefetch, partition) in OPT_VARIANTS {
        let params = AccuGraphParams {
            prefetch_skipping: prefetch,
            partition_skipping: partition,
            ..base
        };
        let mut cfg = ExperimentConfig::new(Accelerator::AccuGraph, problem, label, Profile::Reproduction);
        cfg.roots = roots.clone();
        cfg.accugraph = Some(params);
        let runs = run_with_stats(&cfg, graph, label)?;
        let runtime = runs.iter().map(|(r, _)| r.runtime_s).sum::<f64>() / runs.len() as f64;
        let skipped = |f: fn(&ModelStats) -> u64| runs.iter().map(|(_, s)| f(s)).sum::<u64>();
        if variant == "base" {
            base_runtime = runtime;
        }
        rows.push(OptRow {
            problem,
            graph: label.to_string(),
            stand_in: false,
            partitions: graph.n().div_ceil(k.max(1)),
            variant,
            runtime_s: runtime,
            partitions_skipped: skipped(|s| s.partitions_skipped),
            prefetches_skipped: skipped(|s| s.prefetches_skipped),
            speedup: base_runtime / runtime,
        });
    }
    Ok(rows)
}

/// Runs BFS and WCC on every AccuGraph graph, once with the profile's
/// partitioning and once split into four partitions.
pub fn optimize_study(opts: &SuiteOptions, problems: &[Problem]) -> Result<Vec<OptRow>, BenchError> {
    let table = GroundTruthTable::default();
    let mut rows = Vec::new();
    for ds in DATASETS.iter().filter(|d| opts.wants(d)) {
        if table.lookup(Accelerator::AccuGraph, Problem::Bfs, ds.key).is_none() {
            continue;
        }
        let sg = SuiteGraph::load(ds, false, opts)?;
        let n = sg.graph.n();
        for &problem in problems {
            let native = sg.accugraph(Profile::Reproduction, problem).partition_size;
            for k in [native, Some(n.div_ceil(4))] {
                for mut row in optimize_graph(&sg.graph, &sg.label, problem, k, &opts.roots())? {
                    row.stand_in = sg.stand_in;
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}
