//! splitmix64 stream used by every seeded operation.
//!
//! The exact constants and the multiply-high range reduction are part of the
//! output contract: a sampled dataset must be byte-identical across
//! implementations given the same seed.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[0, k)` via `⌊next · k / 2^64⌋`. `k` must be nonzero.
    pub fn below(&mut self, k: u64) -> u64 {
        debug_assert!(k > 0);
        ((self.next_u64() as u128 * k as u128) >> 64) as u64
    }

    /// Uniform f64 in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
