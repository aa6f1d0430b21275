use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use gpasim_accel::{
    prepare_csr, prepare_edge_lists, run_accugraph, run_hitgraph, AccuGraphParams, HitGraphParams, ModelStats,
    RunOutput,
};
use gpasim_dram::{DramConfig, DramSim};
use gpasim_flow::EngineConfig;
use gpasim_graph::{
    pick_roots, CsrPartitions, EdgeListPartitions, Graph, Problem, ProblemSpec, VertexId, PAPER_ROOT_SEED,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{dataset, load_edge_list};
use crate::profiles::{self, Profile};
use crate::{coefficient_of_variation, compute_reps, mean, Accelerator, BenchError};

/// One experiment, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub accelerator: Accelerator,
    #[serde(with = "crate::problem_serde")]
    pub problem: Problem,
    /// Registry key or name (`sd`, `wiki-talk`), or a path to an edge list.
    pub dataset: String,
    #[serde(default)]
    pub profile: Profile,
    /// Duplicate every line of an edge list given by path.
    #[serde(default)]
    pub undirected: bool,
    /// Overrides the profile's memory.
    pub dram: Option<DramConfig>,
    pub hitgraph: Option<HitGraphParams>,
    pub accugraph: Option<AccuGraphParams>,
    #[serde(default = "default_mhz")]
    pub accel_mhz: u32,
    #[serde(default)]
    pub roots: RootsPolicy,
    #[serde(default = "one")]
    pub repetitions: u32,
    /// Sweeps for SpMV and PageRank.
    #[serde(default = "one")]
    pub iterations: u32,
    pub damping: Option<f64>,
    /// Write a DRAM command trace per run, suffixed with root and repetition.
    pub trace: Option<PathBuf>,
}

fn default_mhz() -> u32 {
    200
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootsPolicy {
    Fixed(Vec<VertexId>),
    Mt19937 { seed: u32, count: usize },
}

impl Default for RootsPolicy {
    fn default() -> Self {
        RootsPolicy::Mt19937 {
            seed: PAPER_ROOT_SEED,
            count: 20,
        }
    }
}

impl ExperimentConfig {
    pub fn new(accelerator: Accelerator, problem: Problem, dataset: &str, profile: Profile) -> Self {
        ExperimentConfig {
            accelerator,
            problem,
            dataset: dataset.to_string(),
            profile,
            undirected: false,
            dram: None,
            hitgraph: None,
            accugraph: None,
            accel_mhz: default_mhz(),
            roots: RootsPolicy::default(),
            repetitions: 1,
            iterations: 1,
            damping: None,
            trace: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        Self::from_table(text.parse()?)
    }

    /// Partial `dram`, `hitgraph` and `accugraph` tables override only the
    /// keys they name; the rest comes from the profile.
    pub fn from_table(mut table: toml::Table) -> Result<Self, BenchError> {
        let plain: ExperimentConfig = table.clone().try_into()?;
        let defaults = [
            (
                "dram",
                toml::Table::try_from(profiles::dram_config(plain.accelerator, plain.profile)),
            ),
            (
                "hitgraph",
                toml::Table::try_from(profiles::hitgraph_params(plain.profile)),
            ),
            (
                "accugraph",
                toml::Table::try_from(profiles::accugraph_params(plain.profile, plain.problem, &plain.dataset)),
            ),
        ];
        for (key, base) in defaults {
            if let Some(toml::Value::Table(given)) = table.remove(key) {
                let mut merged = base.map_err(|e| BenchError::Config(e.to_string()))?;
                merged.extend(given);
                table.insert(key.to_string(), toml::Value::Table(merged));
            }
        }
        Ok(table.try_into()?)
    }

    pub fn dram_config(&self) -> DramConfig {
        self.dram
            .clone()
            .unwrap_or_else(|| profiles::dram_config(self.accelerator, self.profile))
    }

    fn roots(&self, n: usize) -> Result<Vec<Option<VertexId>>, BenchError> {
        if !self.problem.needs_root() {
            return Ok(vec![None]);
        }
        let roots = match &self.roots {
            RootsPolicy::Fixed(list) => list.clone(),
            RootsPolicy::Mt19937 { seed, count } => pick_roots(n, *count, *seed)?,
        };
        Ok(roots.into_iter().map(Some).collect())
    }

    fn spec(&self, root: Option<VertexId>) -> ProblemSpec {
        let mut s = profiles::problem_spec(self.accelerator, self.profile, self.problem, root, self.iterations);
        if let Some(d) = self.damping {
            s.damping = d;
        }
        s
    }
}

/// Per-run results; these are the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub accelerator: Accelerator,
    #[serde(with = "crate::problem_serde")]
    pub problem: Problem,
    pub graph: String,
    pub root: Option<VertexId>,
    pub iterations: u32,
    pub cycles: u64,
    pub runtime_s: f64,
    pub greps: f64,
    pub row_hits: u64,
    pub row_misses: u64,
    pub row_conflicts: u64,
    pub bytes_read: u64,
    pub bytes_written: u64,
}

impl RunRecord {
    pub fn new(
        accelerator: Accelerator,
        problem: Problem,
        graph: &str,
        root: Option<VertexId>,
        m: u64,
        out: &RunOutput,
    ) -> Self {
        let sim = &out.sim;
        RunRecord {
            accelerator,
            problem,
            graph: graph.to_string(),
            root,
            iterations: sim.iterations,
            cycles: sim.accel_cycles,
            runtime_s: sim.runtime_s,
            greps: compute_reps(m, sim.iterations, sim.runtime_s) / 1e9,
            row_hits: sim.dram.row_hits,
            row_misses: sim.dram.row_misses,
            row_conflicts: sim.dram.row_conflicts,
            bytes_read: sim.dram.bytes_read,
            bytes_written: sim.dram.bytes_written,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub runs: usize,
    pub mean_runtime_s: f64,
    /// Coefficient of variation of the runtimes.
    pub cov: f64,
    pub mean_greps: f64,
}

impl Summary {
    pub fn of(records: &[RunRecord]) -> Option<Summary> {
        if records.is_empty() {
            return None;
        }
        let rt: Vec<f64> = records.iter().map(|r| r.runtime_s).collect();
        let gr: Vec<f64> = records.iter().map(|r| r.greps).collect();
        Some(Summary {
            runs: records.len(),
            mean_runtime_s: mean(&rt),
            cov: coefficient_of_variation(&rt),
            mean_greps: mean(&gr),
        })
    }
}

/// A graph laid out for one accelerator, shared by all runs on it.
pub enum Prepared {
    HitGraph(EdgeListPartitions, HitGraphParams),
    AccuGraph(CsrPartitions, AccuGraphParams),
}

impl Prepared {
    pub fn hitgraph(graph: &Graph, params: HitGraphParams) -> Self {
        Prepared::HitGraph(prepare_edge_lists(graph, &params), params)
    }

    pub fn accugraph(graph: &Graph, params: AccuGraphParams) -> Self {
        Prepared::AccuGraph(prepare_csr(graph, &params), params)
    }
}

pub fn simulate(
    prepared: &Prepared,
    spec: &ProblemSpec,
    dram: &DramConfig,
    accel_mhz: u32,
    trace: Option<&Path>,
) -> Result<RunOutput, BenchError> {
    let mut sim = DramSim::new(dram.clone())?;
    if let Some(path) = trace {
        sim.set_trace(Box::new(BufWriter::new(File::create(path)?)));
    }
    let engine = EngineConfig::new(accel_mhz);
    Ok(match prepared {
        Prepared::HitGraph(parts, params) => run_hitgraph(parts, spec, params, sim, engine)?,
        Prepared::AccuGraph(csr, params) => run_accugraph(csr, spec, params, sim, engine)?,
    })
}

fn trace_path(base: &Path, root: Option<VertexId>, rep: u32, many: bool) -> PathBuf {
    if !many {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("txt");
    let root = root.map_or("none".to_string(), |r| r.to_string());
    base.with_file_name(format!("{stem}-{root}-{rep}.{ext}"))
}

/// Runs `cfg` on an already loaded graph; one record per root and
/// repetition, in that order.
pub fn run_on_graph(cfg: &ExperimentConfig, graph: &Graph, label: &str) -> Result<Vec<RunRecord>, BenchError> {
    Ok(run_with_stats(cfg, graph, label)?.into_iter().map(|(r, _)| r).collect())
}

pub(crate) fn run_with_stats(
    cfg: &ExperimentConfig,
    graph: &Graph,
    label: &str,
) -> Result<Vec<(RunRecord, ModelStats)>, BenchError> {
    profiles::check_supported(cfg.accelerator, cfg.profile, cfg.problem)?;
    if cfg.repetitions == 0 {
        return Err(BenchError::Config("repetitions must be at least 1".into()));
    }
    let prepared = match cfg.accelerator {
        Accelerator::HitGraph => Prepared::hitgraph(
            graph,
            cfg.hitgraph.unwrap_or_else(|| profiles::hitgraph_params(cfg.profile)),
        ),
        Accelerator::AccuGraph => Prepared::accugraph(
            graph,
            cfg.accugraph
                .unwrap_or_else(|| profiles::accugraph_params(cfg.profile, cfg.problem, &cfg.dataset)),
        ),
    };
    let dram = cfg.dram_config();
    let roots = cfg.roots(graph.n())?;
    let jobs: Vec<(Option<VertexId>, u32)> = roots
        .iter()
        .flat_map(|&r| (0..cfg.repetitions).map(move |rep| (r, rep)))
        .collect();
    let many = jobs.len() > 1;
    jobs.par_iter()
        .map(|&(root, rep)| {
            let trace = cfg.trace.as_deref().map(|t| trace_path(t, root, rep, many));
            let out = simulate(&prepared, &cfg.spec(root), &dram, cfg.accel_mhz, trace.as_deref())?;
            let record = RunRecord::new(cfg.accelerator, cfg.problem, label, root, graph.m() as u64, &out);
            Ok((record, out.stats))
        })
        .collect()
}

/// Loads the configured dataset and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, BenchError> {
    let weighted = profiles::weighted(cfg.accelerator, cfg.profile);
    let (graph, label) = match dataset(&cfg.dataset) {
        Some(ds) => (ds.load(weighted)?, ds.key.to_string()),
        None => {
            let path = Path::new(&cfg.dataset);
            if !path.is_file() {
                return Err(BenchError::Config(format!(
                    "{} is neither a known dataset nor a file",
                    cfg.dataset
                )));
            }
            let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
            (load_edge_list(path, cfg.undirected, weighted)?, label)
        }
    };
    run_on_graph(cfg, &graph, &label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_config() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            accelerator = "accugraph"
            problem = "bfs"
            dataset = "sd"
            roots = { fixed = [1, 2] }
            repetitions = 2
            [accugraph]
            prefetch_skipping = true
            "#,
        )
        .unwrap();
        assert_eq!(cfg.accelerator, Accelerator::AccuGraph);
        assert_eq!(cfg.problem, Problem::Bfs);
        assert_eq!(cfg.roots, RootsPolicy::Fixed(vec![1, 2]));
        assert_eq!(cfg.accel_mhz, 200);
        assert!(cfg.accugraph.unwrap().prefetch_skipping);
        assert_eq!(cfg.accugraph.unwrap().edge_pipelines, 16);
        let d =
            ExperimentConfig::from_toml("accelerator = \"hitgraph\"\nproblem = \"sssp\"\ndataset = \"wt\"").unwrap();
        assert_eq!(
            d.roots,
            RootsPolicy::Mt19937 {
                seed: PAPER_ROOT_SEED,
                count: 20
            }
        );
        assert!(ExperimentConfig::from_toml("accelerator = \"x\"\nproblem = \"bfs\"\ndataset = \"sd\"").is_err());
        assert!(ExperimentConfig::from_toml(
            "accelerator = \"hitgraph\"\nproblem = \"bfs\"\ndataset = \"sd\"\nbogus = 1"
        )
        .is_err());
    }

    #[test]
    fn partial_tables_keep_profile_values() {
        let cfg = ExperimentConfig::from_toml(
            "accelerator = \"hitgraph\"\nproblem = \"wcc\"\ndataset = \"wt\"\n[dram]\nrefresh = false\n[hitgraph]\npes = 2\n",
        )
        .unwrap();
        let d = cfg.dram_config();
        assert_eq!(
            (d.channels, d.ranks, d.speed.as_str(), d.refresh),
            (4, 2, "1600K", false)
        );
        let h = cfg.hitgraph.unwrap();
        assert_eq!((h.pes, h.pipelines, h.partition_size), (2, 8, 256_000));
        let cfg = ExperimentConfig::from_toml(
            "accelerator = \"accugraph\"\nproblem = \"wcc\"\ndataset = \"or\"\n[accugraph]\nbram_banks = 8\n",
        )
        .unwrap();
        let a = cfg.accugraph.unwrap();
        assert_eq!((a.bram_banks, a.partition_size), (8, Some(1_700_000)));
    }

    #[test]
    fn trace_names() {
        let p = Path::new("/tmp/t.log");
        assert_eq!(trace_path(p, Some(4), 1, true), Path::new("/tmp/t-4-1.log"));
        assert_eq!(trace_path(p, None, 0, false), p);
    }
}
