//! Seeded random substreams.
//!
//! Every random decision in a simulation is drawn from a [`RandomStream`]
//! identified by a master seed and a path of indices, e.g.
//! `(replicate, fund, stage)`. The generator for a stream is derived only from
//! that identity, so work can be scheduled on any number of threads without
//! changing a single draw.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

/// The generator handed out by [`RandomStream::rng`].
pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    master_seed: u64,
    stream_path: Vec<u64>,
}

impl RandomStream {
    /// Root stream for a master seed.
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_path: Vec::new(),
        }
    }

    pub fn with_path(master_seed: u64, stream_path: &[u64]) -> Self {
        Self {
            master_seed,
            stream_path: stream_path.to_vec(),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_path(&self) -> &[u64] {
        &self.stream_path
    }

    /// Child stream with `index` appended to the path.
    pub fn substream(&self, index: u64) -> Self {
        let mut stream_path = Vec::with_capacity(self.stream_path.len() + 1);
        stream_path.extend_from_slice(&self.stream_path);
        stream_path.push(index);
        Self {
            master_seed: self.master_seed,
            stream_path,
        }
    }

    /// 64-bit key identifying this stream. Paths of different lengths never
    /// collide structurally because the length is folded in last.
    pub fn key(&self) -> u64 {
        self.key_with(&[])
    }

    fn key_with(&self, extra: &[u64]) -> u64 {
        let mut h = mix64(self.master_seed.wrapping_add(GOLDEN_GAMMA));
        let path = self.stream_path.iter().chain(extra.iter());
        let mut len = 0u64;
        for (i, &p) in path.enumerate() {
            let salted = p.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN_GAMMA));
            h = mix64(h ^ mix64(salted));
            len += 1;
        }
        mix64(h ^ len.wrapping_mul(GOLDEN_GAMMA))
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        StreamRng::seed_from_u64(self.key())
    }

    /// Generator for `self.substream(a).substream(b)` without allocating the
    /// intermediate path. Used in the per-fund hot loop.
    pub fn child_rng(&self, a: u64, b: u64) -> StreamRng {
        StreamRng::seed_from_u64(self.key_with(&[a, b]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn draws(stream: &RandomStream, n: usize) -> Vec<u64> {
        let mut rng = stream.rng();
        (0..n).map(|_| rng.random()).collect()
    }

    #[test]
    fn identical_identity_identical_output() {
        let a = RandomStream::with_path(42, &[1, 2, 3]);
        let b = RandomStream::new(42).substream(1).substream(2).substream(3);
        assert_eq!(a, b);
        assert_eq!(draws(&a, 16), draws(&b, 16));
    }

    #[test]
    fn child_rng_matches_substreams() {
        let root = RandomStream::with_path(7, &[3]);
        let mut fast = root.child_rng(11, 2);
        let mut slow = root.substream(11).substream(2).rng();
        for _ in 0..8 {
            assert_eq!(fast.random::<u64>(), slow.random::<u64>());
        }
    }

    #[test]
    fn distinct_paths_distinct_streams() {
        let root = RandomStream::new(1);
        let keys = [
            root.key(),
            root.substream(0).key(),
            root.substream(1).key(),
            root.substream(0).substream(0).key(),
            RandomStream::new(2).key(),
            RandomStream::with_path(1, &[1, 0]).key(),
            RandomStream::with_path(1, &[0, 1]).key(),
        ];
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                assert_ne!(keys[i], keys[j], "collision between {i} and {j}");
            }
        }
    }

    #[test]
    fn sibling_streams_uncorrelated() {
        // Sample correlation between uniforms of neighbouring streams.
        let root = RandomStream::new(99);
        let n = 20_000;
        let mut a = root.substream(0).rng();
        let mut b = root.substream(1).rng();
        let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x: f64 = a.random();
            let y: f64 = b.random();
            sa += x;
            sb += y;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
        let n = n as f64;
        let cov = sab / n - sa / n * sb / n;
        let corr = cov / ((saa / n - (sa / n).powi(2)) * (sbb / n - (sb / n).powi(2))).sqrt();
        assert!(corr.abs() < 0.03, "corr = {corr}");
    }
}
