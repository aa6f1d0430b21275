use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gpasim_bench::suites::{comparability_suite, optimize_study, reproduce, ReproRow, SuiteOptions, COMPARE_PROBLEMS};
use gpasim_bench::{
    dataset, emit_plot_data, emit_results, emit_rows, run_experiment, Accelerator, BenchError, ExperimentConfig,
    Format, PlotPoint, Summary,
};
use gpasim_graph::Problem;

#[derive(Parser)]
#[command(name = "gpasim", version, about = "Graph accelerator memory simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Result file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Also run live-journal, orkut, twitter and the R-MAT graphs.
    #[arg(long, global = true)]
    large: bool,
    /// DRAM command trace: a file for `run`, a directory for the suites.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Use synthetic stand-ins even where dataset files exist.
    #[arg(long, global = true)]
    synthetic: bool,
    /// Edge budget of synthetic stand-ins.
    #[arg(long, global = true, default_value_t = gpasim_bench::synthetic::DESK_EDGES)]
    max_edges: usize,
    /// Roots per BFS/SSSP experiment in the suites.
    #[arg(long, global = true, default_value_t = 20)]
    roots: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML file.
    Run {
        config: PathBuf,
        /// Override a config key, e.g. `--set repetitions=3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Rerun an accelerator's published simulation rows.
    Reproduce {
        accelerator: Accelerator,
        /// Write GREPS-by-average-degree points, one file per problem.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// HitGraph vs AccuGraph on the same single DDR4 channel.
    Compare {
        #[arg(long, value_delimiter = ',')]
        problems: Option<Vec<Problem>>,
    },
    /// AccuGraph with and without prefetch and partition skipping.
    OptimizeStudy {
        #[arg(long, value_delimiter = ',')]
        problems: Option<Vec<Problem>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, BenchError> {
    let mut table: toml::Table = std::fs::read_to_string(path)?.parse()?;
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| BenchError::Config(format!("expected KEY=VALUE, got {o:?}")))?;
        let value = format!("v = {value}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        let mut at = &mut table;
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().expect("split yields one part");
        for p in parts {
            at = at
                .entry(p)
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| BenchError::Config(format!("{key}: {p} is not a table")))?;
        }
        at.insert(last.to_string(), value);
    }
    ExperimentConfig::from_table(table)
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    let c = cli.common;
    let out = c.out.as_deref();
    let opts = SuiteOptions {
        large: c.large,
        synthetic: c.synthetic,
        max_edges: c.max_edges,
        roots: c.roots,
        trace: c.trace.clone(),
    };
    if let Some(dir) = &opts.trace {
        if !matches!(cli.command, Command::Run { .. }) {
            std::fs::create_dir_all(dir)?;
        }
    }
    match cli.command {
        Command::Run { config, overrides } => {
            let mut cfg = load_config(&config, &overrides)?;
            if c.trace.is_some() {
                cfg.trace = c.trace;
            }
            let records = run_experiment(&cfg)?;
            if let Some(s) = Summary::of(&records).filter(|s| s.runs > 1) {
                eprintln!(
                    "{} runs: mean {:.6} s, CoV {:.4}, {:.4} GREPS",
                    s.runs, s.mean_runtime_s, s.cov, s.mean_greps
                );
            }
            emit_results(&records, c.format, out)
        }
        Command::Reproduce { accelerator, plot } => {
            let rows = reproduce(accelerator, &opts)?;
            for r in &rows {
                eprintln!("{}", describe(r));
            }
            if let Some(p) = plot {
                write_plot(&rows, &p)?;
            }
            emit_rows(&rows, c.format, out)
        }
        Command::Compare { problems } => {
            let rows = comparability_suite(&opts, problems.as_deref().unwrap_or(&COMPARE_PROBLEMS))?;
            for r in &rows {
                eprintln!(
                    "{:<4} {:<8} hitgraph {:.6} s ({:.1} it), accugraph {:.6} s ({:.1} it), factor {:.2}",
                    r.problem,
                    r.graph,
                    r.hitgraph_runtime_s,
                    r.hitgraph_iterations,
                    r.accugraph_runtime_s,
                    r.accugraph_iterations,
                    r.factor
                );
            }
            emit_rows(&rows, c.format, out)
        }
        Command::OptimizeStudy { problems } => {
            let rows = optimize_study(&opts, problems.as_deref().unwrap_or(&[Problem::Bfs, Problem::Wcc]))?;
            for r in &rows {
                eprintln!(
                    "{:<4} {:<8} {} partitions {:<9} {:.6} s speedup {:.3}",
                    r.problem, r.graph, r.partitions, r.variant, r.runtime_s, r.speedup
                );
            }
            emit_rows(&rows, c.format, out)
        }
    }
}

fn describe(r: &ReproRow) -> String {
    let err = |e: Option<f64>| e.map_or("-".to_string(), |e| format!("{e:.1}%"));
    format!(
        "{:<4} {:<8} it {:>5.1} measured {:.4} (truth {}, published sim {}) error {} / {}, {:.3} cycles/edge{}",
        r.problem,
        r.graph,
        r.iterations,
        r.measured,
        r.ground_truth,
        r.simulation,
        err(r.error_vs_truth),
        err(r.error_vs_simulation),
        r.cycles_per_edge,
        if r.cov > 0.0 {
            format!(", CoV {:.3}", r.cov)
        } else {
            String::new()
        }
    )
}

fn write_plot(rows: &[ReproRow], path: &Path) -> Result<(), BenchError> {
    let mut problems: Vec<Problem> = Vec::new();
    for r in rows {
        if !problems.contains(&r.problem) {
            problems.push(r.problem);
        }
    }
    for problem in problems {
        let points: Vec<PlotPoint> = rows
            .iter()
            .filter(|r| r.problem == problem)
            .filter(|r| r.iterations <= 1.0 || !problem.is_stationary())
            .map(|r| {
                let key = r.graph.trim_start_matches("syn-");
                PlotPoint {
                    graph: r.graph.clone(),
                    avg_degree: dataset(key).map_or(f64::NAN, |d| d.avg_degree),
                    greps: r.greps,
                }
            })
            .collect();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
        let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
        emit_plot_data(&points, Some(&path.with_file_name(format!("{stem}-{problem}.{ext}"))))?;
    }
    Ok(())
}
