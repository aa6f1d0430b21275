use gpasim_dram::{Completion, DramConfig, DramCoord, DramSim, Enqueue, MemRequest, ReqKind, Standard};

fn ddr3_single() -> DramSim {
    DramSim::new(DramConfig::new(Standard::Ddr3, 1, 1, "1600K", "8Gb_x16").with_refresh(false)).unwrap()
}

// address on channel 0, rank 0 of the single-channel DDR3 device
fn addr_of(bank: u32, row: u32, column: u32) -> u64 {
    ddr3_single().mapper().compose(&DramCoord {
        channel: 0,
        rank: 0,
        bank_group: 0,
        bank,
        row,
        column,
    })
}

fn run_one(sim: &mut DramSim, req: MemRequest) -> Completion {
    assert_eq!(sim.enqueue(req).unwrap(), Enqueue::Accepted);
    for _ in 0..10_000 {
        if let Some(c) = sim.tick().into_iter().find(|c| c.id == req.id) {
            return c;
        }
    }
    panic!("request {} never completed", req.id);
}

#[test]
fn table_configurations_build() {
    for (std, ch, ra, speed, org) in [
        (Standard::Ddr3, 4, 2, "1600K", "8Gb_x16"),
        (Standard::Ddr4, 1, 1, "2400R", "4Gb_x16"),
        (Standard::Ddr4, 1, 1, "2400R", "8Gb_x16"),
    ] {
        let sim = DramSim::new(DramConfig::new(std, ch, ra, speed, org)).unwrap();
        assert!(sim.is_idle());
        assert_eq!(sim.stats().requests(), 0);
        let t = sim.timings();
        assert!(t.ras >= t.rcd);
        assert_eq!(t.rc, t.ras + t.rp);
    }
    assert!(DramSim::new(DramConfig::new(Standard::Ddr3, 1, 1, "9999", "8Gb_x16")).is_err());
    assert!(DramSim::new(DramConfig::new(Standard::Ddr3, 1, 1, "1600K", "3Gb_x16")).is_err());
}

#[test]
fn consecutive_lines_alternate_channels() {
    let sim = DramSim::new(DramConfig::new(Standard::Ddr3, 4, 2, "1600K", "8Gb_x16")).unwrap();
    let zero = sim.map_address(0).unwrap();
    assert_eq!(
        zero,
        DramCoord {
            channel: 0,
            rank: 0,
            bank_group: 0,
            bank: 0,
            row: 0,
            column: 0
        }
    );
    assert_eq!(sim.map_address(64).unwrap().channel, 1);
    assert_eq!(sim.map_address(4 * 64).unwrap(), DramCoord { column: 1, ..zero });
    assert!(sim.map_address(sim.mapper().capacity()).is_err());
}

#[test]
fn empty_row_then_hit_then_conflict() {
    let mut sim = ddr3_single();
    let t = *sim.timings();

    let miss = run_one(&mut sim, MemRequest::read(1, addr_of(3, 10, 0)));
    assert_eq!(miss.latency(), t.rcd + t.cl + t.bl);

    let hit = run_one(&mut sim, MemRequest::read(2, addr_of(3, 10, 5)));
    assert_eq!(hit.latency(), t.cl + t.bl);

    // long after the activate, so only tRP + tRCD stand in the way
    for _ in 0..100 {
        sim.tick();
    }
    let conflict = run_one(&mut sim, MemRequest::read(3, addr_of(3, 11, 0)));
    assert_eq!(conflict.latency(), t.rp + t.rcd + t.cl + t.bl);

    let s = sim.stats();
    assert_eq!((s.row_misses, s.row_hits, s.row_conflicts), (1, 1, 1));
}

#[test]
fn back_to_back_same_row_reads() {
    let mut sim = ddr3_single();
    let t = *sim.timings();
    run_one(&mut sim, MemRequest::read(0, addr_of(0, 7, 0)));
    sim.enqueue(MemRequest::read(1, addr_of(0, 7, 1))).unwrap();
    sim.enqueue(MemRequest::read(2, addr_of(0, 7, 2))).unwrap();
    let done = sim.drain(1000);
    assert_eq!(done.len(), 2);
    // the first column command issues on arrival, the second tCCD later
    assert_eq!(done[0].latency(), t.cl + t.bl);
    assert_eq!(done[1].finished - done[0].finished, t.ccd_s);
}

#[test]
fn row_switch_respects_trc() {
    let mut sim = ddr3_single();
    let t = *sim.timings();
    sim.enqueue(MemRequest::read(1, addr_of(2, 1, 0))).unwrap();
    sim.enqueue(MemRequest::read(2, addr_of(2, 2, 0))).unwrap();
    let done = sim.drain(1000);
    let (a, b) = (done[0], done[1]);
    assert_eq!(a.id, 1);
    // A activates at 0; B's activate cannot precede tRC, its data follows tRCD + tCL + burst
    assert!(b.finished >= t.rc + t.rcd + t.cl + t.bl);
    assert!(b.finished - a.finished >= t.rp + t.rcd);
}

#[test]
fn same_row_reads_give_n_minus_one_hits() {
    let mut sim = ddr3_single();
    let n = 20u64;
    for i in 0..n {
        sim.enqueue(MemRequest::read(i, addr_of(1, 99, i as u32))).unwrap();
    }
    assert_eq!(sim.drain(10_000).len(), n as usize);
    let s = sim.stats();
    assert_eq!(s.row_hits, n - 1);
    assert_eq!(s.row_misses, 1);
    assert_eq!(s.row_conflicts, 0);
}

#[test]
fn thirty_third_request_is_rejected() {
    let mut sim = ddr3_single();
    for i in 0..32 {
        assert_eq!(sim.enqueue(MemRequest::read(i, i * 64)).unwrap(), Enqueue::Accepted);
    }
    assert!(!sim.can_accept(32 * 64, ReqKind::Read));
    assert_eq!(sim.enqueue(MemRequest::read(32, 32 * 64)).unwrap(), Enqueue::Full);
    // the write queue is separate
    assert_eq!(sim.enqueue(MemRequest::write(33, 0)).unwrap(), Enqueue::Accepted);
    assert_eq!(sim.drain(100_000).len(), 33);
}

#[test]
fn out_of_range_enqueue_is_an_error() {
    let mut sim = ddr3_single();
    let cap = sim.mapper().capacity();
    assert!(sim.can_accept(cap, ReqKind::Read));
    assert!(sim.enqueue(MemRequest::read(0, cap)).is_err());
}

#[test]
fn writes_complete_at_issue() {
    let mut sim = ddr3_single();
    let t = *sim.timings();
    let c = run_one(&mut sim, MemRequest::write(5, addr_of(0, 0, 0)));
    assert_eq!(c.kind, ReqKind::Write);
    assert_eq!(c.latency(), t.rcd);
    assert_eq!(sim.stats().bytes_written, 64);
}

#[test]
fn refresh_blocks_the_rank() {
    let mut sim = DramSim::new(DramConfig::new(Standard::Ddr3, 1, 1, "1600K", "8Gb_x16")).unwrap();
    let t = *sim.timings();
    // open a row, then sit idle past the first refresh deadline
    run_one(&mut sim, MemRequest::read(0, 0));
    while sim.clk() <= t.refi + t.rp {
        sim.tick();
    }
    assert_eq!(sim.stats().refreshes, 1);
    let c = run_one(&mut sim, MemRequest::read(1, 64));
    // the open row is precharged, then REF holds the rank for tRFC
    assert!(c.finished >= t.refi + t.rp + t.rfc + t.rcd + t.cl + t.bl, "{c:?}");
    assert_eq!(sim.stats().row_misses, 2);
}

#[test]
fn trace_lines_have_nine_fields() {
    use std::io::Write;
    use std::sync::{Arc, Mutex};

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);
    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    let buf = Shared::default();
    let mut sim = ddr3_single();
    sim.set_trace(Box::new(buf.clone()));
    sim.enqueue(MemRequest::read(0, 0x1040)).unwrap();
    sim.enqueue(MemRequest::write(1, 0x2000)).unwrap();
    sim.drain(1000);
    sim.flush_trace();
    let text = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        assert_eq!(line.split_whitespace().count(), 9, "{line}");
    }
    assert!(text.contains(" R 0x1040 "));
}
