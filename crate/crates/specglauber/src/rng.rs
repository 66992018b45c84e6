//! Counter-based deterministic random draws: every value is a pure function
//! of (seed, counter), so parallel chains need no shared stream and seeded
//! runs are bit-reproducible across platforms.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer applied to seed + (ctr+1)*golden.
#[inline]
pub fn mix(seed: u64, ctr: u64) -> u64 {
    let mut z = seed.wrapping_add(ctr.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform f64 in [0,1) from the top 53 bits.
#[inline]
pub fn uniform(seed: u64, ctr: u64) -> f64 {
    (mix(seed, ctr) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in 0..bound (bound > 0).
#[inline]
pub fn below(seed: u64, ctr: u64, bound: usize) -> usize {
    debug_assert!(bound > 0);
    (mix(seed, ctr) % bound as u64) as usize
}

/// Stream handle: a seed plus a running counter.
#[derive(Debug, Clone)]
pub struct Stream {
    pub seed: u64,
    pub ctr: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { seed, ctr: 0 }
    }

    /// Derives an independent stream for a labeled substask.
    pub fn fork(&self, tag: u64) -> Stream {
        Stream {
            seed: mix(self.seed, tag ^ 0xF00D_F00D_F00D_F00D),
            ctr: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self.seed, self.ctr);
        self.ctr += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        let v = uniform(self.seed, self.ctr);
        self.ctr += 1;
        v
    }

    pub fn below(&mut self, bound: usize) -> usize {
        let v = below(self.seed, self.ctr, bound);
        self.ctr += 1;
        v
    }
}
