use serde::Serialize;

use crate::config::Standard;
use crate::{DramError, Result};

/// Device geometry of one chip; a rank gangs `64 / dq` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Organization {
    pub density_gbit: u32,
    pub dq: u32,
    pub bank_groups: u32,
    pub banks_per_group: u32,
    pub rows: u32,
    pub columns: u32,
}

impl Organization {
    pub fn banks(&self) -> u32 {
        self.bank_groups * self.banks_per_group
    }

    /// Bytes in an open row across the 64-bit rank.
    pub fn row_bytes(&self) -> u64 {
        self.columns as u64 * 8
    }

    pub fn lines_per_row(&self) -> u32 {
        self.columns / 8
    }

    pub fn rank_bytes(&self) -> u64 {
        self.row_bytes() * self.rows as u64 * self.banks() as u64
    }
}

/// Command timing in memory-clock cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DramTimings {
    pub clock_mhz: u32,
    pub tck_ns: f64,
    /// Data-bus cycles per burst (BL8 on a DDR bus).
    pub bl: u64,
    pub cl: u64,
    pub cwl: u64,
    pub rcd: u64,
    pub rp: u64,
    pub ras: u64,
    pub rc: u64,
    pub rtp: u64,
    pub wr: u64,
    pub wtr_s: u64,
    pub wtr_l: u64,
    pub ccd_s: u64,
    pub ccd_l: u64,
    pub rrd_s: u64,
    pub rrd_l: u64,
    pub faw: u64,
    pub rtrs: u64,
    pub refi: u64,
    pub rfc: u64,
}

impl DramTimings {
    /// Read-to-write turnaround on the same rank.
    pub fn rtw(&self) -> u64 {
        self.cl + self.bl + 2 - self.cwl
    }

    /// Peak data-bus bandwidth of one channel in bytes per memory cycle.
    pub fn peak_bytes_per_cycle(&self) -> f64 {
        crate::LINE_BYTES as f64 / self.bl as f64
    }
}

struct Bin {
    mhz: u32,
    cl: u64,
    rcd: u64,
    rp: u64,
    cwl: u64,
    ras: u64,
    rc: u64,
    rtp: u64,
    wr: u64,
    wtr_s: u64,
    wtr_l: u64,
    ccd_s: u64,
    ccd_l: u64,
}

// ns-valued parameters that scale with page size or density
fn ns_to_cycles(ns: f64, mhz: u32) -> u64 {
    (ns * mhz as f64 / 1000.0 - 1e-9).ceil() as u64
}

fn ddr3_bin(token: &str) -> Option<Bin> {
    let base = Bin {
        mhz: 800,
        cl: 11,
        rcd: 11,
        rp: 11,
        cwl: 8,
        ras: 28,
        rc: 39,
        rtp: 6,
        wr: 12,
        wtr_s: 6,
        wtr_l: 6,
        ccd_s: 4,
        ccd_l: 4,
    };
    Some(match token {
        "1600K" => base,
        "1600J" => Bin {
            cl: 10,
            rcd: 10,
            rp: 10,
            rc: 38,
            ..base
        },
        "1600H" => Bin {
            cl: 9,
            rcd: 9,
            rp: 9,
            rc: 37,
            ..base
        },
        "1333H" => Bin {
            mhz: 667,
            cl: 9,
            rcd: 9,
            rp: 9,
            cwl: 7,
            ras: 24,
            rc: 33,
            rtp: 5,
            wr: 10,
            wtr_s: 5,
            wtr_l: 5,
            ..base
        },
        "1866M" => Bin {
            mhz: 933,
            cl: 13,
            rcd: 13,
            rp: 13,
            cwl: 9,
            ras: 32,
            rc: 45,
            rtp: 7,
            wr: 14,
            wtr_s: 7,
            wtr_l: 7,
            ..base
        },
        _ => return None,
    })
}

fn ddr4_bin(token: &str) -> Option<Bin> {
    let base = Bin {
        mhz: 1200,
        cl: 16,
        rcd: 16,
        rp: 16,
        cwl: 12,
        ras: 39,
        rc: 55,
        rtp: 9,
        wr: 18,
        wtr_s: 3,
        wtr_l: 9,
        ccd_s: 4,
        ccd_l: 6,
    };
    Some(match token {
        "2400R" => base,
        "2400T" => Bin {
            cl: 17,
            rcd: 17,
            rp: 17,
            rc: 56,
            ..base
        },
        "2400U" => Bin {
            cl: 18,
            rcd: 18,
            rp: 18,
            rc: 57,
            ..base
        },
        "2133P" => Bin {
            mhz: 1067,
            cl: 15,
            rcd: 15,
            rp: 15,
            cwl: 11,
            ras: 36,
            rc: 51,
            rtp: 8,
            wr: 16,
            wtr_s: 3,
            wtr_l: 8,
            ccd_s: 4,
            ccd_l: 6,
        },
        "3200AA" => Bin {
            mhz: 1600,
            cl: 22,
            rcd: 22,
            rp: 22,
            cwl: 16,
            ras: 52,
            rc: 74,
            rtp: 12,
            wr: 24,
            wtr_s: 4,
            wtr_l: 12,
            ccd_s: 4,
            ccd_l: 8,
        },
        _ => return None,
    })
}

pub(crate) fn organization(standard: Standard, token: &str) -> Result<Organization> {
    let org = |density_gbit, dq, bank_groups, banks_per_group, rows, columns| Organization {
        density_gbit,
        dq,
        bank_groups,
        banks_per_group,
        rows,
        columns,
    };
    let found = match (standard, token) {
        (Standard::Ddr3, "2Gb_x8") => org(2, 8, 1, 8, 1 << 15, 1024),
        (Standard::Ddr3, "2Gb_x16") => org(2, 16, 1, 8, 1 << 14, 1024),
        (Standard::Ddr3, "4Gb_x8") => org(4, 8, 1, 8, 1 << 16, 1024),
        (Standard::Ddr3, "4Gb_x16") => org(4, 16, 1, 8, 1 << 15, 1024),
        (Standard::Ddr3, "8Gb_x8") => org(8, 8, 1, 8, 1 << 16, 2048),
        (Standard::Ddr3, "8Gb_x16") => org(8, 16, 1, 8, 1 << 16, 1024),
        (Standard::Ddr4, "4Gb_x8") => org(4, 8, 4, 4, 1 << 15, 1024),
        (Standard::Ddr4, "4Gb_x16") => org(4, 16, 2, 4, 1 << 15, 1024),
        (Standard::Ddr4, "8Gb_x8") => org(8, 8, 4, 4, 1 << 16, 1024),
        (Standard::Ddr4, "8Gb_x16") => org(8, 16, 2, 4, 1 << 16, 1024),
        _ => {
            return Err(DramError::UnknownOrganization {
                standard,
                token: token.to_string(),
            });
        }
    };
    Ok(found)
}

pub(crate) fn timings(standard: Standard, speed: &str, org: &Organization) -> Result<DramTimings> {
    let bin = match standard {
        Standard::Ddr3 => ddr3_bin(speed),
        Standard::Ddr4 => ddr4_bin(speed),
    }
    .ok_or_else(|| DramError::UnknownSpeed {
        standard,
        token: speed.to_string(),
    })?;
    let mhz = bin.mhz;
    let cyc = |ns: f64| ns_to_cycles(ns, mhz);
    let wide_page = org.dq == 16;
    let (rrd_s, rrd_l, faw) = match standard {
        Standard::Ddr3 => {
            let (rrd, faw) = if wide_page { (7.5, 40.0) } else { (6.0, 30.0) };
            let rrd = cyc(rrd).max(4);
            (rrd, rrd, cyc(faw))
        }
        Standard::Ddr4 => {
            let (s, l, faw) = if wide_page { (5.3, 6.4, 30.0) } else { (3.3, 4.9, 21.0) };
            (cyc(s).max(4), cyc(l).max(4), cyc(faw))
        }
    };
    let rfc_ns = match (standard, org.density_gbit) {
        (_, 1) => 110.0,
        (_, 2) => 160.0,
        (Standard::Ddr3, 4) => 260.0,
        (Standard::Ddr3, _) => 350.0,
        (Standard::Ddr4, 4) => 260.0,
        (Standard::Ddr4, 8) => 350.0,
        (Standard::Ddr4, _) => 550.0,
    };
    Ok(DramTimings {
        clock_mhz: mhz,
        tck_ns: 1000.0 / mhz as f64,
        bl: 4,
        cl: bin.cl,
        cwl: bin.cwl,
        rcd: bin.rcd,
        rp: bin.rp,
        ras: bin.ras,
        rc: bin.rc,
        rtp: bin.rtp,
        wr: bin.wr,
        wtr_s: bin.wtr_s,
        wtr_l: bin.wtr_l,
        ccd_s: bin.ccd_s,
        ccd_l: bin.ccd_l,
        rrd_s,
        rrd_l,
        faw,
        rtrs: 2,
        refi: cyc(7800.0),
        rfc: cyc(rfc_ns),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ddr3_1600k_8gb_x16() {
        let org = organization(Standard::Ddr3, "8Gb_x16").unwrap();
        let t = timings(Standard::Ddr3, "1600K", &org).unwrap();
        assert_eq!(t.clock_mhz, 800);
        assert_eq!((t.cl, t.rcd, t.rp, t.cwl), (11, 11, 11, 8));
        assert_eq!((t.ras, t.rc, t.rrd_s, t.faw), (28, 39, 6, 32));
        assert_eq!((t.refi, t.rfc), (6240, 280));
        assert_eq!(org.banks(), 8);
        assert_eq!(org.rank_bytes(), 4 << 30);
    }

    #[test]
    fn ddr4_2400r_4gb_x16() {
        let org = organization(Standard::Ddr4, "4Gb_x16").unwrap();
        let t = timings(Standard::Ddr4, "2400R", &org).unwrap();
        assert_eq!(t.clock_mhz, 1200);
        assert_eq!((t.cl, t.rcd, t.rp, t.cwl), (16, 16, 16, 12));
        assert_eq!((t.rrd_s, t.rrd_l, t.faw), (7, 8, 36));
        assert_eq!((t.ccd_s, t.ccd_l, t.wtr_s, t.wtr_l), (4, 6, 3, 9));
        assert_eq!((t.refi, t.rfc), (9360, 312));
        assert_eq!(org.rank_bytes(), 2 << 30);
        let big = organization(Standard::Ddr4, "8Gb_x16").unwrap();
        assert_eq!(timings(Standard::Ddr4, "2400R", &big).unwrap().rfc, 420);
    }

    #[test]
    fn density_matches_geometry() {
        for std in [Standard::Ddr3, Standard::Ddr4] {
            for tok in ["2Gb_x8", "2Gb_x16", "4Gb_x8", "4Gb_x16", "8Gb_x8", "8Gb_x16"] {
                let Ok(o) = organization(std, tok) else { continue };
                let bits = o.banks() as u64 * o.rows as u64 * o.columns as u64 * o.dq as u64;
                assert_eq!(bits, (o.density_gbit as u64) << 30, "{std} {tok}");
            }
        }
    }

    #[test]
    fn unknown_tokens() {
        assert!(organization(Standard::Ddr4, "2Gb_x4").is_err());
        let org = organization(Standard::Ddr4, "8Gb_x16").unwrap();
        assert!(matches!(
            timings(Standard::Ddr4, "1600K", &org),
            Err(DramError::UnknownSpeed { .. })
        ));
    }
}
