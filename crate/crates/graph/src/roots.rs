use crate::{GraphError, Result, VertexId};

/// Seed used for the published SSSP root selection.
pub const PAPER_ROOT_SEED: u32 = 3_483_584_297;

const N: usize = 624;
const M: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER: u32 = 0x8000_0000;
const LOWER: u32 = 0x7fff_ffff;

/// 32-bit Mersenne Twister, bit-compatible with C++ `std::mt19937`.
#[derive(Clone)]
pub struct Mt19937 {
    state: [u32; N],
    index: usize,
}

impl Mt19937 {
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; N];
        state[0] = seed;
        for i in 1..N {
            let prev = state[i - 1];
            state[i] = 1_812_433_253u32
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        Mt19937 { state, index: N }
    }

    fn twist(&mut self) {
        for i in 0..N {
            let y = (self.state[i] & UPPER) | (self.state[(i + 1) % N] & LOWER);
            let mut next = self.state[(i + M) % N] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= N {
            self.twist();
        }
        let mut y = self.state[self.index];
        self.index += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^ (y >> 18)
    }
}

/// Draws `count` root vertices: each raw 32-bit output reduced modulo `n`.
pub fn pick_roots(n: usize, count: usize, seed: u32) -> Result<Vec<VertexId>> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    let mut rng = Mt19937::new(seed);
    Ok((0..count)
        .map(|_| (rng.next_u32() as u64 % n as u64) as VertexId)
        .collect())
}
