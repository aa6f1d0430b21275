use gpasim_dram::ReqKind;
use smallvec::SmallVec;

use crate::graph::NodeId;

/// Identifies a run of `len` consecutive elements, starting at `start`, of
/// whatever the workload associated with `tag`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Callback {
    pub tag: u32,
    pub len: u32,
    pub start: u64,
}

impl Callback {
    pub fn new(tag: u32, start: u64, len: u32) -> Self {
        Callback { tag, len, start }
    }

    pub fn end(&self) -> u64 {
        self.start + self.len as u64
    }
}

pub type Callbacks = SmallVec<[Callback; 2]>;

/// Appends `cb`, extending the last entry when the ranges are adjacent.
pub fn push_callback(list: &mut Callbacks, cb: Callback) {
    if let Some(last) = list.last_mut() {
        if last.tag == cb.tag && last.end() == cb.start {
            if let Some(len) = last.len.checked_add(cb.len) {
                last.len = len;
                return;
            }
        }
    }
    list.push(cb);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub addr: u64,
    pub bytes: u32,
    pub kind: ReqKind,
    /// Accelerator cycle at which the request became available.
    pub stamp: u64,
    pub source: NodeId,
    pub callbacks: Callbacks,
}

impl Request {
    pub fn line(&self) -> u64 {
        self.addr / gpasim_dram::LINE_BYTES
    }

    pub fn last_line(&self) -> u64 {
        (self.addr + self.bytes.max(1) as u64 - 1) / gpasim_dram::LINE_BYTES
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_ranges_merge() {
        let mut l = Callbacks::new();
        push_callback(&mut l, Callback::new(1, 0, 1));
        push_callback(&mut l, Callback::new(1, 1, 3));
        push_callback(&mut l, Callback::new(2, 4, 1));
        push_callback(&mut l, Callback::new(1, 4, 1));
        assert_eq!(
            l.as_slice(),
            &[Callback::new(1, 0, 4), Callback::new(2, 4, 1), Callback::new(1, 4, 1)]
        );
    }
}
