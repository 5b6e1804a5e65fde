//! Counter-based pseudo-random numbers used by every stochastic routine.
//!
//! The generator is SplitMix64 evaluated in counter mode: the `n`-th output
//! of stream `key` is `mix(key + (n + 1) * 0x9E3779B97F4A7C15)` where `mix`
//! is the SplitMix64 finalizer. Output depends only on `(key, n)`, so streams
//! are reproducible bit-for-bit on every platform. Changing anything in this
//! file changes every generated fixture; bump [`PRNG_VERSION`] if you do.

pub const PRNG_VERSION: &str = "splitmix64-ctr/1";

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a stream key from a seed and a label, e.g. `("restart", 3)`.
pub fn derive_key(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = mix64(seed ^ 0x5EED_5EED_5EED_5EED);
    for b in label.bytes() {
        h = mix64(h ^ u64::from(b));
    }
    mix64(h ^ index.wrapping_mul(GAMMA))
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn from_seed(seed: u64, label: &str, index: u64) -> Self {
        Self::new(derive_key(seed, label, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` by rejection on the top of the range.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Geometric count on `{0, 1, ...}` with the given mean.
    pub fn geometric(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let q = mean / (1.0 + mean);
        let u = 1.0 - self.next_f64();
        (u.ln() / q.ln()).floor() as u64
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Cumulative-weight table for repeated weighted draws.
#[derive(Debug, Clone)]
pub struct WeightedIndex {
    cumulative: Vec<f64>,
}

impl WeightedIndex {
    /// Returns `None` when the weights are empty or sum to zero.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            if !w.is_finite() || w < 0.0 {
                return None;
            }
            acc += w;
            cumulative.push(acc);
        }
        (acc > 0.0).then_some(Self { cumulative })
    }

    pub fn sample(&self, rng: &mut CounterRng) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let target = rng.next_f64() * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        idx.min(self.cumulative.len() - 1)
    }
}
