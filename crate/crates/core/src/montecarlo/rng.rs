//! Stream-splitting rule.
//!
//! Every random quantity is drawn from a ChaCha8 generator whose 64-bit seed
//! is `mix(master, family, a, b, c)` and whose stream id is the sample index.
//! `family` names the kind of draw (a point class, the tagged link, the
//! self-interference orientation); `a, b, c` locate it (tile coordinates and
//! class, or an arbitrary key). Draws therefore never depend on how sample
//! indices are distributed over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn mix(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5EED_F00D_u64, |h, &p| splitmix64(h ^ splitmix64(p)))
}

pub(crate) fn stream(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

/// Families of draws; values are part of the reproducibility contract.
pub(crate) mod family {
    pub const POINTS: u64 = 1;
    pub const TAGGED_DL: u64 = 2;
    pub const TAGGED_UL: u64 = 3;
    pub const SELF_INTERFERENCE: u64 = 4;
    pub const CELL_UE: u64 = 5;
}

/// Neumaier-compensated sum; order is fixed by the caller.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}
