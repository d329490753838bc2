//! Deterministic seed derivation for replicated, parallel work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed used by the command line when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 12345;

/// Derives independent child seeds from one master seed.
///
/// A child seed depends only on `(master_seed, rep_index, purpose_tag)`, so any
/// work item can build its own generator without shared mutable state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPlan {
    master_seed: u64,
}

impl SeedPlan {
    pub fn new(master_seed: u64) -> Self {
        SeedPlan { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream(&self, rep_index: u64, purpose_tag: &str) -> u64 {
        let mut s = splitmix64(self.master_seed ^ 0x6c6c_6173_736f_0001);
        s = splitmix64(s ^ rep_index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        splitmix64(s ^ fnv1a(purpose_tag.as_bytes()))
    }

    pub fn rng(&self, rep_index: u64, purpose_tag: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream(rep_index, purpose_tag))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
