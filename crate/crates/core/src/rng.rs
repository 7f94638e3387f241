//! Deterministic random number generation.
//!
//! Every random quantity in this crate flows through [`SplitMix64`]. The
//! algorithm (Steele, Lea & Flood's SplitMix64, the mixer behind Java's
//! `SplittableRandom`) is short enough to restate in any language, so a seed
//! recorded in a report pins the exact same state families, measurement
//! bases, and sample streams everywhere:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits of an output; normal deviates use the
//! Box-Muller transform on two consecutive uniforms (no caching of the second
//! deviate), so the mapping from the integer stream to deviates is positional.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 pseudo-random generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next 64 pseudo-random bits.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform double in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `(0, 1]`, safe as a logarithm argument.
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal deviate via Box-Muller on two fresh uniforms.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Derives an independent child seed: `split_seed(seed, i)` equals the
/// `(i+1)`-th raw output of `SplitMix64::new(seed)`, computed in O(1).
///
/// Work partitioned across workers must seed each item with its own
/// `split_seed(seed, item_index)`; merged results are then independent of how
/// items were assigned to workers.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GAMMA.wrapping_mul(index.wrapping_add(1))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(17);
        let mut b = SplitMix64::new(17);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_matches_sequential_outputs() {
        let mut r = SplitMix64::new(9001);
        for i in 0..10 {
            assert_eq!(split_seed(9001, i), r.next_u64());
        }
    }

    #[test]
    fn uniforms_in_range() {
        let mut r = SplitMix64::new(3);
        for _ in 0..10_000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            let v = r.next_f64_open();
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn normals_have_sane_moments() {
        let mut r = SplitMix64::new(88);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = r.next_normal();
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
