use std::collections::BTreeSet;

use gpasim_accel::{
    bram_bank_delay, prepare_csr, prepare_edge_lists, run_accugraph, run_hitgraph, skip_decisions, AccelError,
    AccuGraphParams, BramBanks, HitGraphParams,
};
use gpasim_dram::{DramConfig, DramSim, Standard};
use gpasim_flow::EngineConfig;
use gpasim_graph::{fixtures, partition_edge_list, Graph, GraphError, Problem, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ddr3() -> DramSim {
    DramSim::new(DramConfig::new(Standard::Ddr3, 4, 2, "1600K", "8Gb_x16")).unwrap()
}

fn ddr4() -> DramSim {
    DramSim::new(DramConfig::new(Standard::Ddr4, 1, 1, "2400R", "4Gb_x16")).unwrap()
}

fn pr1() -> ProblemSpec {
    ProblemSpec::new(Problem::PageRank).with_iterations(1)
}

fn hit(g: &Graph, s: &ProblemSpec, p: HitGraphParams) -> gpasim_accel::RunOutput {
    run_hitgraph(&prepare_edge_lists(g, &p), s, &p, ddr3(), EngineConfig::default()).unwrap()
}

fn accu(g: &Graph, s: &ProblemSpec, p: AccuGraphParams) -> gpasim_accel::RunOutput {
    run_accugraph(&prepare_csr(g, &p), s, &p, ddr4(), EngineConfig::default()).unwrap()
}

#[test]
fn one_update_per_edge_without_merging() {
    let g = fixtures::example_graph();
    let p = HitGraphParams {
        partition_size: 3,
        ..HitGraphParams::default()
    }
    .without_optimizations();
    let out = hit(&g, &ProblemSpec::new(Problem::Wcc), p);
    assert_eq!(out.stats.updates, g.m() as u64 * out.sim.iterations as u64);
}

#[test]
fn merged_updates_are_distinct_destinations() {
    let g = fixtures::uniform(500, 5000, 3);
    let p = HitGraphParams {
        partition_size: 128,
        update_merging: true,
        ..HitGraphParams::default()
    };
    let parts = partition_edge_list(&g, 128);
    let distinct: usize = (0..parts.count())
        .map(|s| parts.edges(s).iter().map(|e| e.dst).collect::<BTreeSet<_>>().len())
        .sum();
    let out = hit(&g, &pr1(), p);
    assert_eq!(out.stats.updates, distinct as u64);
    assert!(out.stats.updates <= (g.n() * parts.count()) as u64);
}

#[test]
fn edge_reads_are_whole_partition_lines() {
    let g = fixtures::uniform(1000, 7777, 4);
    for weighted in [false, true] {
        let g = g.clone().with_weighted(weighted);
        let p = HitGraphParams {
            partition_size: 300,
            ..HitGraphParams::default()
        }
        .without_optimizations();
        let parts = partition_edge_list(&g, 300);
        let eb = if weighted { 12 } else { 8 };
        let lines: u64 = (0..parts.count())
            .map(|s| (parts.edges(s).len() as u64 * eb).div_ceil(64))
            .sum();
        let out = hit(&g, &pr1(), p);
        assert_eq!(out.sim.requests["edges"], lines);
    }
}

#[test]
fn sorted_updates_coalesce_value_writes() {
    let g = fixtures::uniform(800, 6000, 5);
    let p = HitGraphParams {
        pes: 1,
        partition_size: 800,
        ..HitGraphParams::default()
    };
    let out = hit(&g, &pr1(), p);
    assert!(out.sim.requests["value-writes"] <= 800u64.div_ceil(16));
    assert!(out.stats.value_writes > 700);
}

#[test]
fn bfs_frontier_in_one_partition_scatters_once() {
    // root 0 has no out-edges, so the first gather finds nothing to do
    let pairs: Vec<(u32, u32)> = (1..399).map(|v| (v, v + 1)).collect();
    let g = Graph::from_pairs(400, &pairs);
    let p = HitGraphParams {
        partition_size: 100,
        ..HitGraphParams::default()
    };
    let out = hit(&g, &ProblemSpec::new(Problem::Bfs).with_root(0), p);
    assert_eq!(out.sim.iterations, 1);
    assert_eq!(out.stats.partitions_run, 1);
    assert_eq!(out.stats.partitions_skipped, 3 + 4);
    assert!(!out.sim.requests.contains_key("update-writes"));
}

#[test]
fn partition_without_edges_only_prefetches() {
    let g = Graph::from_pairs(8, &[]);
    let p = HitGraphParams {
        partition_size: 8,
        ..HitGraphParams::default()
    }
    .without_optimizations();
    let out = hit(&g, &ProblemSpec::new(Problem::Wcc), p);
    let kinds: Vec<&str> = out.sim.requests.keys().map(String::as_str).collect();
    assert_eq!(kinds, ["prefetch"]);
    // one line prefetched in scatter and one in gather
    assert_eq!(out.sim.requests["prefetch"], 2);
}

#[test]
fn hitgraph_requests_stay_on_their_channel() {
    let g = fixtures::uniform(1000, 4000, 6);
    let p = HitGraphParams {
        partition_size: 250,
        ..HitGraphParams::default()
    };
    let mut dram = ddr3();
    let buf = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
    struct Sink(std::sync::Arc<std::sync::Mutex<Vec<u8>>>);
    impl std::io::Write for Sink {
        fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(b);
            Ok(b.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }
    dram.set_trace(Box::new(Sink(buf.clone())));
    let out = run_hitgraph(&prepare_edge_lists(&g, &p), &pr1(), &p, dram, EngineConfig::default()).unwrap();
    let text = String::from_utf8(buf.lock().unwrap().clone()).unwrap();
    let mut per_channel = [0u64; 4];
    for line in text.lines() {
        per_channel[line.split_whitespace().nth(3).unwrap().parse::<usize>().unwrap()] += 1;
    }
    // four partitions, one per channel: every channel carries traffic
    assert!(per_channel.iter().all(|&c| c > 0), "{per_channel:?}");
    assert_eq!(per_channel.iter().sum::<u64>(), out.sim.dram.requests());
}

#[test]
fn hitgraph_parameter_errors() {
    let g = fixtures::example_graph();
    let s = ProblemSpec::new(Problem::Wcc);
    let p = HitGraphParams {
        pes: 8,
        partition_size: 3,
        ..HitGraphParams::default()
    };
    let r = run_hitgraph(&prepare_edge_lists(&g, &p), &s, &p, ddr3(), EngineConfig::default());
    assert!(matches!(r, Err(AccelError::Params(_))));
    let p = HitGraphParams {
        partition_size: 3,
        ..HitGraphParams::default()
    };
    let unsorted = partition_edge_list(&g, 3);
    let r = run_hitgraph(&unsorted, &s, &p, ddr3(), EngineConfig::default());
    assert!(matches!(r, Err(AccelError::Params(_))));
}

#[test]
fn single_partition_reads_no_destination_values() {
    let g = fixtures::uniform(500, 3000, 7);
    let out = accu(&g, &ProblemSpec::new(Problem::Wcc), AccuGraphParams::default());
    assert!(!out.sim.requests.contains_key("values"));
    assert!(out.sim.flow.filtered >= 500 * out.sim.iterations as u64);
    let split = accu(
        &g,
        &ProblemSpec::new(Problem::Wcc),
        AccuGraphParams {
            partition_size: Some(250),
            ..Default::default()
        },
    );
    assert!(split.sim.requests["values"] > 0);
}

#[test]
fn neighbor_and_pointer_volume() {
    let g = fixtures::uniform(1000, 9000, 8);
    let p = AccuGraphParams {
        partition_size: Some(300),
        ..AccuGraphParams::default()
    };
    let csr = prepare_csr(&g, &p);
    let out = run_accugraph(&csr, &pr1(), &p, ddr4(), EngineConfig::default()).unwrap();
    let neighbor_lines: u64 = (0..csr.count())
        .map(|q| (csr.part(q).edge_count() as u64 * 4).div_ceil(64))
        .sum();
    assert_eq!(out.sim.requests["neighbors"], neighbor_lines);
    assert_eq!(
        out.sim.requests["pointers"],
        csr.count() as u64 * (1001u64 * 4).div_ceil(64)
    );
}

#[test]
fn isolated_destinations_are_never_written() {
    // only v1 has an in-edge
    let g = Graph::from_pairs(64, &[(0, 1)]);
    let out = accu(
        &g,
        &ProblemSpec::new(Problem::Bfs).with_root(0).with_value_bits(8),
        AccuGraphParams::default(),
    );
    assert_eq!(out.stats.value_writes, 1);
    assert_eq!(out.sim.requests["writes"], 1);
    assert_eq!(out.values.as_discrete().unwrap()[1], 1);
}

#[test]
fn eight_bit_bfs_overflow_is_an_error() {
    let g = fixtures::chain(300);
    let s = ProblemSpec::new(Problem::Bfs).with_root(0).with_value_bits(8);
    let p = AccuGraphParams::default();
    let r = run_accugraph(&prepare_csr(&g, &p), &s, &p, ddr4(), EngineConfig::default());
    assert!(matches!(
        r,
        Err(AccelError::Graph(GraphError::ValueOverflow { bits: 8, .. }))
    ));
}

#[test]
fn bank_delay_arithmetic() {
    let mut banks = BramBanks::new(16);
    for v in 0..16 {
        assert_eq!(bram_bank_delay(v, &mut banks, 10), 10);
    }
    let mut banks = BramBanks::new(16);
    let last = (0..16)
        .map(|i| bram_bank_delay(i * 16 + 3, &mut banks, 10))
        .last()
        .unwrap();
    assert_eq!(last, 25);
    // a later cycle finds the bank free again
    assert_eq!(bram_bank_delay(3, &mut banks, 40), 40);
}

#[test]
fn bank_stall_follows_collision_probability() {
    // r requests in one cycle over 16 banks: the expected number of colliding
    // pairs per bank is C(r,2)/256, each pair adding one cycle of wait
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut previous = 0.0;
    for r in [2u64, 4, 8, 16, 32] {
        let trials = 20_000;
        let mut total = 0u64;
        for t in 0..trials {
            let mut banks = BramBanks::new(16);
            let now = 1000 * t;
            for _ in 0..r {
                total += bram_bank_delay(rng.gen_range(0..1 << 20), &mut banks, now) - now;
            }
        }
        let mean = total as f64 / (trials * r) as f64;
        let expected = (r - 1) as f64 / 32.0;
        assert!(
            (mean - expected).abs() < 0.03 + 0.03 * expected,
            "r={r}: {mean} vs {expected}"
        );
        assert!(mean > previous);
        previous = mean;
    }
}

#[test]
fn skip_rules() {
    let on = AccuGraphParams::default().with_optimizations();
    let off = AccuGraphParams::default();
    let d = skip_decisions(&on, Problem::Wcc, Some(0), 0, false);
    assert!(!d.prefetch && !d.run);
    let d = skip_decisions(&on, Problem::PageRank, Some(0), 0, false);
    assert!(!d.prefetch && d.run);
    let d = skip_decisions(&on, Problem::Wcc, Some(0), 1, true);
    assert!(d.prefetch && d.run);
    let d = skip_decisions(&off, Problem::Wcc, Some(0), 0, false);
    assert!(d.prefetch && d.run);
}

#[test]
fn single_partition_skips_prefetch_after_first_sweep() {
    let g = fixtures::symmetrize(&fixtures::uniform(2000, 5000, 9));
    let s = ProblemSpec::new(Problem::Wcc);
    let base = accu(&g, &s, AccuGraphParams::default());
    let opt = accu(&g, &s, AccuGraphParams::default().with_optimizations());
    assert_eq!(opt.values, base.values);
    assert_eq!(opt.stats.prefetches_skipped, opt.sim.iterations as u64 - 1);
    assert!(opt.sim.accel_cycles < base.sim.accel_cycles);
}

#[test]
fn optimizations_never_slow_accugraph_down() {
    for (seed, k) in [(1, Some(500)), (2, Some(700)), (3, None)] {
        let g = fixtures::symmetrize(&fixtures::skewed(2048, 6000, seed));
        for s in [
            ProblemSpec::new(Problem::Wcc),
            ProblemSpec::new(Problem::Bfs).with_root(0),
        ] {
            let p = AccuGraphParams {
                partition_size: k,
                ..AccuGraphParams::default()
            };
            let base = accu(&g, &s, p);
            let opt = accu(&g, &s, p.with_optimizations());
            assert_eq!(opt.values, base.values);
            assert!(
                opt.sim.accel_cycles as f64 <= 1.01 * base.sim.accel_cycles as f64,
                "seed {seed} {}: {} > {}",
                s.problem,
                opt.sim.accel_cycles,
                base.sim.accel_cycles
            );
        }
    }
}

#[test]
fn accugraph_reads_fewer_edge_bytes_than_hitgraph() {
    let g = fixtures::symmetrize(&fixtures::uniform(3000, 15000, 10));
    let s = ProblemSpec::new(Problem::Wcc);
    let hp = HitGraphParams {
        pes: 1,
        pipelines: 16,
        partition_size: 1_024_000,
        ..HitGraphParams::default()
    };
    let dram = DramSim::new(DramConfig::new(Standard::Ddr4, 1, 1, "2400R", "8Gb_x16")).unwrap();
    let h = run_hitgraph(&prepare_edge_lists(&g, &hp), &s, &hp, dram, EngineConfig::default()).unwrap();
    let a = accu(&g, &s, AccuGraphParams::default());
    let hit_bytes = (h.stats.edges_read * 8 + h.stats.updates * 8 * 2) as f64 / h.sim.iterations as f64;
    let accu_bytes = (a.stats.edges_read * 4) as f64 / a.sim.iterations as f64;
    assert!(accu_bytes < hit_bytes, "{accu_bytes} >= {hit_bytes}");
    assert!(a.sim.runtime_s < h.sim.runtime_s);
}
