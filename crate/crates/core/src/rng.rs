//! Counter-based random streams.
//!
//! Each draw site asks for a fresh generator keyed on `(seed, stream, agent,
//! step)`. Streams never share state, so the order in which agents or seeds
//! are processed (and the number of worker threads) cannot change a result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named stream families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Price shocks published by the market; common to all agents.
    Nature,
    /// Per-agent gradient noise `w_i^k`.
    StrategyNoise,
    /// Per-agent learning samples `η^k`.
    Learning,
    /// Per-agent steplength offsets.
    Schedule,
    /// Benchmark instance parameters.
    Instance,
    /// Sampling used by estimators and tests.
    Sampling,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Nature => 0x4e41_5455,
            Stream::StrategyNoise => 0x5354_524e,
            Stream::Learning => 0x4c45_4152,
            Stream::Schedule => 0x5343_4845,
            Stream::Instance => 0x494e_5354,
            Stream::Sampling => 0x5341_4d50,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes the key into a 64-bit seed.
pub fn stream_seed(seed: u64, stream: Stream, agent: u64, step: u64) -> u64 {
    let mut h = splitmix(seed ^ stream.tag());
    h = splitmix(h ^ agent.wrapping_mul(0xd6e8_feb8_6659_fd93));
    splitmix(h ^ step.wrapping_mul(0xa076_1d64_78bd_642f))
}

/// Generator for one `(seed, stream, agent, step)` cell.
pub fn stream_rng(seed: u64, stream: Stream, agent: u64, step: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, stream, agent, step))
}
