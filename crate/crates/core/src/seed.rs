//! Seeded random streams for reproducible selection.
//!
//! Every randomized decision draws from its own splitmix64 stream derived
//! from the global run seed, the anchor (node or pair) the decision is
//! about, and a purpose tag separating neighbor draws from demonstration
//! draws. The derivation is pure integer arithmetic, so identical inputs
//! produce identical selections on any platform and at any concurrency
//! level.

const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;

/// The splitmix64 generator (Steele, Lea & Flood).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `0..bound` via modulo reduction.
    ///
    /// The slight modulo bias is irrelevant here; the reduction rule is part
    /// of the reproducibility contract and must not change.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }
}

/// What a derived stream is used for. Keeps neighbor draws and
/// demonstration draws independent for the same anchor and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Neighbors = 1,
    Demonstrations = 2,
}

/// Key identifying the subject of a selection decision.
///
/// Node anchors use the node id; pair anchors pack both endpoints so that
/// distinct pairs sharing a first node still get distinct streams.
pub fn node_key(id: usize) -> u64 {
    id as u64
}

pub fn pair_key(src: usize, dst: usize) -> u64 {
    ((src as u64) << 32) | (dst as u64 & 0xFFFF_FFFF)
}

/// Derive the decision stream for `(global_seed, anchor, purpose)`.
///
/// The stream state is one splitmix64 step of
/// `global_seed XOR (anchor_key * GOLDEN_GAMMA) XOR purpose`.
pub fn decision_stream(global_seed: u64, anchor_key: u64, purpose: Purpose) -> SplitMix64 {
    let combined = global_seed ^ anchor_key.wrapping_mul(GOLDEN_GAMMA) ^ purpose as u64;
    SplitMix64::new(SplitMix64::new(combined).next_u64())
}

/// Partial Fisher-Yates: draw up to `m` elements of `pool` in selection
/// order, consuming one stream output per draw.
pub fn partial_shuffle<T: Copy>(pool: &[T], m: usize, stream: &mut SplitMix64) -> Vec<T> {
    let mut pool = pool.to_vec();
    let take = m.min(pool.len());
    for i in 0..take {
        let j = i + stream.below(pool.len() - i);
        pool.swap(i, j);
    }
    pool.truncate(take);
    pool
}
