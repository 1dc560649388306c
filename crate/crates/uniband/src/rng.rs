//! Deterministic splittable random streams.
//!
//! Every (policy, replication, arm) triple gets its own generator whose seed
//! is a pure mixing function of the master seed and that triple, so sample
//! sequences never depend on scheduling, thread count, or iteration order.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64: a 64-bit state counter generator with full-period output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }
}

/// Derive a substream seed from the master seed and a key path.
///
/// Each path element is mixed in separately, so distinct paths of the same
/// length land in unrelated regions of the seed space.
pub fn derive_seed(master_seed: u64, path: &[u64]) -> u64 {
    let mut s = mix64(master_seed ^ GOLDEN_GAMMA);
    for &part in path {
        s = mix64(s.wrapping_add(GOLDEN_GAMMA) ^ mix64(part.wrapping_mul(2).wrapping_add(1)));
    }
    s
}

/// One generator per arm for a single (policy, replication) pair.
pub fn arm_streams(
    master_seed: u64,
    policy: u64,
    replication: u64,
    arms: usize,
) -> Vec<SplitMix64> {
    (0..arms as u64)
        .map(|arm| SplitMix64::new(derive_seed(master_seed, &[policy, replication, arm])))
        .collect()
}
