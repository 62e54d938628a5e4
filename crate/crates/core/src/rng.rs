//! Counter-based 64-bit generator used for every stochastic draw in the engine.
//!
//! The state is a single counter; each draw advances it by a fixed odd
//! increment and mixes it with the SplitMix64 finalizer. Two generators with
//! the same counter produce the same stream on every platform, and the counter
//! fits in the canonical state serialization.

const INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Also used as a general-purpose 64-bit hash.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine two words into a well-mixed seed.
pub fn hash2(a: u64, b: u64) -> u64 {
    mix64(a ^ mix64(b.wrapping_add(INCREMENT)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamRng {
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng { counter: mix64(seed) }
    }

    pub fn from_counter(counter: u64) -> Self {
        StreamRng { counter }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(INCREMENT);
        mix64(self.counter)
    }

    /// Uniform integer in `0..n` (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.index(items.len())])
        }
    }
}
