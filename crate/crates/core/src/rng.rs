//! Counter-based random streams.
//!
//! Every random draw in a run comes from a generator keyed by the master seed,
//! a stream tag, and the entity indices and slot it belongs to. Streams never
//! share state, so one policy's choices cannot shift another's draws, and the
//! rate seen on a given (satellite, station, slot) is identical across policies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Values are arbitrary but fixed; changing one changes every
/// run that uses the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    GslNoise = 0x006e_6f69_7365,
    DailyVolume = 0x766f_6c75_6d65,
    DutyPhase = 0x6475_7479,
    BrokerRandom = 0x6272_6f6b_6572,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes the seed, stream tag and key words into one 64-bit value.
pub fn stream_key(seed: u64, stream: Stream, key: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ splitmix64(stream as u64));
    for &k in key {
        h = splitmix64(h ^ splitmix64(k));
    }
    h
}

pub fn stream_rng(seed: u64, stream: Stream, key: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, stream, key))
}
