use std::collections::VecDeque;

use crate::config::SchedulerKind;
use crate::mapping::DramCoord;
use crate::sim::{Completion, ReqKind};
use crate::stats::DramStats;
use crate::tables::DramTimings;
use crate::LINE_BYTES;

const WRITE_HIGH_WATERMARK: f64 = 0.8;
const WRITE_LOW_WATERMARK: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowOutcome {
    Hit,
    Miss,
    Conflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    Act,
    Pre,
    Rd,
    Wr,
}

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub id: u64,
    pub addr: u64,
    pub coord: DramCoord,
    pub arrival: u64,
    pub kind: ReqKind,
    outcome: Option<RowOutcome>,
}

impl Entry {
    pub fn new(id: u64, addr: u64, coord: DramCoord, arrival: u64, kind: ReqKind) -> Self {
        Entry {
            id,
            addr,
            coord,
            arrival,
            kind,
            outcome: None,
        }
    }
}

// Each field is the earliest cycle the command may issue.
#[derive(Debug, Clone, Default)]
struct Bank {
    open: Option<u32>,
    act: u64,
    pre: u64,
    rd: u64,
    wr: u64,
}

#[derive(Debug, Clone, Default)]
struct Group {
    act: u64,
    rd: u64,
    wr: u64,
}

#[derive(Debug, Clone)]
struct Rank {
    act: u64,
    rd: u64,
    wr: u64,
    recent_acts: VecDeque<u64>,
    refresh_due: u64,
    refresh_pending: bool,
    groups: Vec<Group>,
    banks: Vec<Bank>,
}

#[derive(Debug)]
pub(crate) struct Channel {
    t: DramTimings,
    banks_per_group: usize,
    scheduler: SchedulerKind,
    depth: usize,
    refresh: bool,
    ranks: Vec<Rank>,
    readq: Vec<Entry>,
    writeq: Vec<Entry>,
    write_mode: bool,
    next_check: u64,
    inflight: VecDeque<(u64, Entry)>,
    hit_scratch: Vec<bool>,
    pub stats: DramStats,
}

fn bump(slot: &mut u64, at: u64) {
    if *slot < at {
        *slot = at;
    }
}

impl Channel {
    pub fn new(
        t: DramTimings,
        ranks: usize,
        bank_groups: usize,
        banks_per_group: usize,
        scheduler: SchedulerKind,
        depth: usize,
        refresh: bool,
    ) -> Self {
        let rank = Rank {
            act: 0,
            rd: 0,
            wr: 0,
            recent_acts: VecDeque::with_capacity(4),
            refresh_due: t.refi,
            refresh_pending: false,
            groups: vec![Group::default(); bank_groups],
            banks: vec![Bank::default(); bank_groups * banks_per_group],
        };
        Channel {
            t,
            banks_per_group,
            scheduler,
            depth,
            refresh,
            ranks: vec![rank; ranks],
            readq: Vec::with_capacity(depth),
            writeq: Vec::with_capacity(depth),
            write_mode: false,
            next_check: 0,
            inflight: VecDeque::new(),
            hit_scratch: vec![false; ranks * bank_groups * banks_per_group],
            stats: DramStats::default(),
        }
    }

    pub fn can_accept(&self, kind: ReqKind) -> bool {
        match kind {
            ReqKind::Read => self.readq.len() < self.depth,
            ReqKind::Write => self.writeq.len() < self.depth,
        }
    }

    pub fn push(&mut self, e: Entry, now: u64) {
        match e.kind {
            ReqKind::Read => self.readq.push(e),
            ReqKind::Write => self.writeq.push(e),
        }
        self.next_check = self.next_check.min(now);
    }

    pub fn pending(&self) -> usize {
        self.readq.len() + self.writeq.len() + self.inflight.len()
    }

    pub fn queued(&self, kind: ReqKind) -> usize {
        match kind {
            ReqKind::Read => self.readq.len(),
            ReqKind::Write => self.writeq.len(),
        }
    }

    /// Earliest cycle at which this channel might change state.
    pub fn next_event(&self) -> u64 {
        let done = self.inflight.front().map_or(u64::MAX, |(d, _)| *d);
        let idle_check = if self.readq.is_empty() && self.writeq.is_empty() && !self.refresh {
            u64::MAX
        } else {
            self.next_check
        };
        done.min(idle_check)
    }

    fn bank_index(&self, c: &DramCoord) -> usize {
        c.bank_group as usize * self.banks_per_group + c.bank as usize
    }

    fn scratch_index(&self, c: &DramCoord) -> usize {
        c.rank as usize * self.ranks[0].banks.len() + self.bank_index(c)
    }

    fn next_cmd(&self, e: &Entry) -> Cmd {
        let bank = &self.ranks[e.coord.rank as usize].banks[self.bank_index(&e.coord)];
        match bank.open {
            Some(row) if row == e.coord.row => match e.kind {
                ReqKind::Read => Cmd::Rd,
                ReqKind::Write => Cmd::Wr,
            },
            Some(_) => Cmd::Pre,
            None => Cmd::Act,
        }
    }

    fn ready_at(&self, cmd: Cmd, c: &DramCoord) -> u64 {
        let rank = &self.ranks[c.rank as usize];
        let group = &rank.groups[c.bank_group as usize];
        let bank = &rank.banks[self.bank_index(c)];
        match cmd {
            Cmd::Act => {
                let faw = if rank.recent_acts.len() == 4 {
                    rank.recent_acts[0] + self.t.faw
                } else {
                    0
                };
                bank.act.max(group.act).max(rank.act).max(faw)
            }
            Cmd::Pre => bank.pre,
            Cmd::Rd => bank.rd.max(group.rd).max(rank.rd),
            Cmd::Wr => bank.wr.max(group.wr).max(rank.wr),
        }
    }

    pub fn tick(&mut self, now: u64, out: &mut Vec<Completion>) {
        while let Some((done, _)) = self.inflight.front() {
            if *done > now {
                break;
            }
            let (done, e) = self.inflight.pop_front().unwrap();
            out.push(Completion {
                id: e.id,
                addr: e.addr,
                kind: e.kind,
                coord: e.coord,
                arrival: e.arrival,
                finished: done,
            });
        }
        if now < self.next_check {
            return;
        }
        if self.refresh {
            for r in &mut self.ranks {
                if now >= r.refresh_due {
                    r.refresh_pending = true;
                }
            }
        }
        self.update_write_mode();

        let mut earliest = u64::MAX;
        let issued = self.service_refresh(now, &mut earliest) || self.schedule(now, &mut earliest, out);
        self.next_check = if issued {
            now + 1
        } else {
            if self.refresh {
                for r in &self.ranks {
                    if !r.refresh_pending {
                        earliest = earliest.min(r.refresh_due);
                    }
                }
            }
            earliest.max(now + 1)
        };
    }

    fn update_write_mode(&mut self) {
        let high = (WRITE_HIGH_WATERMARK * self.depth as f64) as usize;
        let low = (WRITE_LOW_WATERMARK * self.depth as f64) as usize;
        if !self.write_mode {
            if self.writeq.len() > high || self.readq.is_empty() {
                self.write_mode = true;
            }
        } else if self.writeq.len() < low && !self.readq.is_empty() {
            self.write_mode = false;
        }
    }

    fn service_refresh(&mut self, now: u64, earliest: &mut u64) -> bool {
        for r in 0..self.ranks.len() {
            if !self.ranks[r].refresh_pending {
                continue;
            }
            let rank = &mut self.ranks[r];
            let mut any_open = false;
            for bank in &mut rank.banks {
                if bank.open.is_some() {
                    any_open = true;
                    if bank.pre <= now {
                        bank.open = None;
                        bump(&mut bank.act, now + self.t.rp);
                        self.stats.precharges += 1;
                        return true;
                    }
                    *earliest = (*earliest).min(bank.pre);
                }
            }
            if any_open {
                continue;
            }
            let ready = rank.banks.iter().map(|b| b.act).max().unwrap_or(0).max(rank.act);
            if ready <= now {
                let until = now + self.t.rfc;
                for bank in &mut rank.banks {
                    bump(&mut bank.act, until);
                }
                bump(&mut rank.act, until);
                rank.refresh_pending = false;
                rank.refresh_due += self.t.refi;
                self.stats.refreshes += 1;
                return true;
            }
            *earliest = (*earliest).min(ready);
        }
        false
    }

    fn schedule(&mut self, now: u64, earliest: &mut u64, out: &mut Vec<Completion>) -> bool {
        let writing = self.write_mode;
        let queue = if writing { &self.writeq } else { &self.readq };
        if queue.is_empty() {
            return false;
        }
        let pick = match self.scheduler {
            SchedulerKind::Fcfs => {
                let e = &queue[0];
                if self.ranks[e.coord.rank as usize].refresh_pending {
                    None
                } else {
                    let cmd = self.next_cmd(e);
                    let at = self.ready_at(cmd, &e.coord);
                    *earliest = (*earliest).min(at);
                    (at <= now).then_some((0, cmd))
                }
            }
            SchedulerKind::FrFcfs => self.pick_fr_fcfs(now, earliest),
        };
        let Some((idx, cmd)) = pick else { return false };
        self.issue(idx, cmd, now, out);
        true
    }

    fn pick_fr_fcfs(&mut self, now: u64, earliest: &mut u64) -> Option<(usize, Cmd)> {
        let queue = if self.write_mode { &self.writeq } else { &self.readq };
        self.hit_scratch.iter_mut().for_each(|h| *h = false);
        let mut hit_pick = None;
        for (i, e) in queue.iter().enumerate() {
            if self.ranks[e.coord.rank as usize].refresh_pending {
                continue;
            }
            let cmd = self.next_cmd(e);
            if matches!(cmd, Cmd::Rd | Cmd::Wr) {
                let s = self.scratch_index(&e.coord);
                self.hit_scratch[s] = true;
                let at = self.ready_at(cmd, &e.coord);
                *earliest = (*earliest).min(at);
                if at <= now && hit_pick.is_none() {
                    hit_pick = Some((i, cmd));
                }
            }
        }
        if hit_pick.is_some() {
            return hit_pick;
        }
        for (i, e) in queue.iter().enumerate() {
            if self.ranks[e.coord.rank as usize].refresh_pending {
                continue;
            }
            let cmd = self.next_cmd(e);
            match cmd {
                Cmd::Rd | Cmd::Wr => continue,
                // leave the row open while requests still want it
                Cmd::Pre if self.hit_scratch[self.scratch_index(&e.coord)] => continue,
                _ => {}
            }
            let at = self.ready_at(cmd, &e.coord);
            *earliest = (*earliest).min(at);
            if at <= now {
                return Some((i, cmd));
            }
        }
        None
    }

    fn issue(&mut self, idx: usize, cmd: Cmd, now: u64, out: &mut Vec<Completion>) {
        let t = self.t;
        let queue = if self.write_mode {
            &mut self.writeq
        } else {
            &mut self.readq
        };
        let e = &mut queue[idx];
        let c = e.coord;
        if e.outcome.is_none() {
            let outcome = match cmd {
                Cmd::Rd | Cmd::Wr => RowOutcome::Hit,
                Cmd::Act => RowOutcome::Miss,
                Cmd::Pre => RowOutcome::Conflict,
            };
            e.outcome = Some(outcome);
            match outcome {
                RowOutcome::Hit => self.stats.row_hits += 1,
                RowOutcome::Miss => self.stats.row_misses += 1,
                RowOutcome::Conflict => self.stats.row_conflicts += 1,
            }
        }
        let bi = c.bank_group as usize * self.banks_per_group + c.bank as usize;
        let r = c.rank as usize;
        let g = c.bank_group as usize;
        match cmd {
            Cmd::Act => {
                let rank = &mut self.ranks[r];
                let bank = &mut rank.banks[bi];
                bank.open = Some(c.row);
                bump(&mut bank.act, now + t.rc);
                bump(&mut bank.rd, now + t.rcd);
                bump(&mut bank.wr, now + t.rcd);
                bump(&mut bank.pre, now + t.ras);
                bump(&mut rank.groups[g].act, now + t.rrd_l);
                bump(&mut rank.act, now + t.rrd_s);
                if rank.recent_acts.len() == 4 {
                    rank.recent_acts.pop_front();
                }
                rank.recent_acts.push_back(now);
                self.stats.activates += 1;
            }
            Cmd::Pre => {
                let bank = &mut self.ranks[r].banks[bi];
                bank.open = None;
                bump(&mut bank.act, now + t.rp);
                self.stats.precharges += 1;
            }
            Cmd::Rd => {
                for (ri, rank) in self.ranks.iter_mut().enumerate() {
                    if ri == r {
                        bump(&mut rank.banks[bi].pre, now + t.rtp);
                        bump(&mut rank.groups[g].rd, now + t.ccd_l);
                        bump(&mut rank.rd, now + t.ccd_s);
                        bump(&mut rank.wr, now + t.rtw());
                    } else {
                        bump(&mut rank.rd, now + t.bl + t.rtrs);
                        bump(&mut rank.wr, (now + t.cl + t.bl + t.rtrs).saturating_sub(t.cwl));
                    }
                }
                let e = queue.remove(idx);
                let done = now + t.cl + t.bl;
                let latency = done - e.arrival;
                self.stats.reads += 1;
                self.stats.bytes_read += LINE_BYTES;
                self.stats.busy_cycles += t.bl;
                self.stats.read_latency_total += latency;
                self.stats.read_latency_max = self.stats.read_latency_max.max(latency);
                self.inflight.push_back((done, e));
            }
            Cmd::Wr => {
                for (ri, rank) in self.ranks.iter_mut().enumerate() {
                    if ri == r {
                        bump(&mut rank.banks[bi].pre, now + t.cwl + t.bl + t.wr);
                        bump(&mut rank.groups[g].wr, now + t.ccd_l);
                        bump(&mut rank.wr, now + t.ccd_s);
                        bump(&mut rank.groups[g].rd, now + t.cwl + t.bl + t.wtr_l);
                        bump(&mut rank.rd, now + t.cwl + t.bl + t.wtr_s);
                    } else {
                        bump(&mut rank.wr, now + t.bl + t.rtrs);
                        bump(&mut rank.rd, (now + t.cwl + t.bl + t.rtrs).saturating_sub(t.cl));
                    }
                }
                let e = queue.remove(idx);
                self.stats.writes += 1;
                self.stats.bytes_written += LINE_BYTES;
                self.stats.busy_cycles += t.bl;
                // writes are posted: the requester is released at issue
                out.push(Completion {
                    id: e.id,
                    addr: e.addr,
                    kind: e.kind,
                    coord: e.coord,
                    arrival: e.arrival,
                    finished: now,
                });
            }
        }
    }
}
