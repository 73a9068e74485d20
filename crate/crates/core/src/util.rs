//! Deterministic seeded randomness. All sampling in the crate and the CLI
//! flows from a single 64-bit seed through this splitter, so every run is
//! reproducible bit for bit.

/// splitmix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Counter-based stream: `Rng::for_shard(seed, k)` yields independent streams
/// for each shard index `k`, all derived from one master seed.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        splitmix64(&mut s);
        Rng { state: s }
    }

    pub fn for_shard(seed: u64, shard: u64) -> Self {
        let mut s = seed ^ shard.wrapping_mul(0xa0761d6478bd642f);
        splitmix64(&mut s);
        splitmix64(&mut s);
        Rng { state: s }
    }

    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Uniform in `[0, n)`; `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        // rejection sampling keeps the distribution exactly uniform
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}
