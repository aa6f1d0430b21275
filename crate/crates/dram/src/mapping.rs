use serde::Serialize;

use crate::config::{AddressField, AddressScheme};
use crate::tables::Organization;
use crate::{DramError, Result, LINE_BYTES};

const OFFSET_BITS: u32 = 6;

/// Location of one cache line. `column` counts lines within the row, not
/// device columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DramCoord {
    pub channel: u32,
    pub rank: u32,
    pub bank_group: u32,
    pub bank: u32,
    pub row: u32,
    pub column: u32,
}

#[derive(Debug, Clone)]
pub struct AddressMapper {
    // (field, shift, width), least significant first
    fields: Vec<(AddressField, u32, u32)>,
    channel_bits: u32,
    capacity: u64,
}

fn log2_exact(v: u32, what: &str) -> Result<u32> {
    if v == 0 || !v.is_power_of_two() {
        return Err(DramError::BadConfig(format!("{what} must be a power of two, got {v}")));
    }
    Ok(v.trailing_zeros())
}

impl AddressMapper {
    pub fn new(scheme: &AddressScheme, org: &Organization, channels: u32, ranks: u32) -> Result<Self> {
        let mut shift = OFFSET_BITS;
        let mut fields = Vec::with_capacity(6);
        let mut channel_bits = 0;
        for &field in scheme.fields_lsb_first() {
            let width = match field {
                AddressField::Channel => log2_exact(channels, "channel count")?,
                AddressField::Column => log2_exact(org.lines_per_row(), "lines per row")?,
                AddressField::Rank => log2_exact(ranks, "rank count")?,
                AddressField::BankGroup => log2_exact(org.bank_groups, "bank groups")?,
                AddressField::Bank => log2_exact(org.banks_per_group, "banks per group")?,
                AddressField::Row => log2_exact(org.rows, "row count")?,
            };
            if field == AddressField::Channel {
                channel_bits = width;
            }
            fields.push((field, shift, width));
            shift += width;
        }
        Ok(AddressMapper {
            fields,
            channel_bits,
            capacity: 1u64 << shift,
        })
    }

    /// Total addressable bytes across all channels.
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn channels(&self) -> u32 {
        1 << self.channel_bits
    }

    pub fn map(&self, addr: u64) -> Result<DramCoord> {
        if addr >= self.capacity {
            return Err(DramError::AddressOutOfRange {
                address: addr,
                capacity: self.capacity,
            });
        }
        let mut c = DramCoord {
            channel: 0,
            rank: 0,
            bank_group: 0,
            bank: 0,
            row: 0,
            column: 0,
        };
        for &(field, shift, width) in &self.fields {
            let v = ((addr >> shift) & ((1u64 << width) - 1)) as u32;
            *slot(&mut c, field) = v;
        }
        Ok(c)
    }

    /// Inverse of [`map`](Self::map); yields the line-aligned address.
    pub fn compose(&self, coord: &DramCoord) -> u64 {
        let mut c = *coord;
        let mut addr = 0u64;
        for &(field, shift, width) in &self.fields {
            let v = *slot(&mut c, field) as u64;
            debug_assert!(v < (1u64 << width), "{field:?} value {v} exceeds {width} bits");
            addr |= (v & ((1u64 << width) - 1)) << shift;
        }
        addr
    }

    /// Converts an offset into one channel's private address space to the
    /// global address that lands on `channel`.
    ///
    /// Channel-local addresses enumerate that channel's lines in the order
    /// the remaining fields appear in the scheme, so consecutive local lines
    /// keep whatever row and bank locality the scheme gives globally.
    pub fn channel_local(&self, channel: u32, local: u64) -> u64 {
        debug_assert!(channel < self.channels());
        let offset = local & (LINE_BYTES - 1);
        let mut rest = local >> OFFSET_BITS;
        let mut addr = offset;
        for &(field, shift, width) in &self.fields {
            let v = if field == AddressField::Channel {
                channel as u64
            } else {
                let v = rest & ((1u64 << width) - 1);
                rest >>= width;
                v
            };
            addr |= v << shift;
        }
        addr
    }

    /// Bytes of one channel's private address space.
    pub fn channel_capacity(&self) -> u64 {
        self.capacity >> self.channel_bits
    }
}

fn slot(c: &mut DramCoord, field: AddressField) -> &mut u32 {
    match field {
        AddressField::Channel => &mut c.channel,
        AddressField::Column => &mut c.column,
        AddressField::Rank => &mut c.rank,
        AddressField::BankGroup => &mut c.bank_group,
        AddressField::Bank => &mut c.bank,
        AddressField::Row => &mut c.row,
    }
}
