//! Named, independent random streams derived from a single master seed.
//!
//! Every consumer of randomness (sampler, estimation, selection, community
//! detection) draws from its own stream keyed by a purpose string and a list
//! of indices, so adding a new strategy or repeat never shifts the draws of
//! another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed for `purpose` and `indices` from `master`.
pub fn derive_seed(master: u64, purpose: &str, indices: &[u64]) -> u64 {
    // FNV-1a over the purpose tag.
    let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.bytes() {
        tag ^= u64::from(b);
        tag = tag.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let mut s = splitmix64(master ^ splitmix64(tag));
    for &i in indices {
        s = splitmix64(s ^ splitmix64(i.wrapping_add(0x2545_F491_4F6C_DD1D)));
    }
    s
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(master: u64, purpose: &str, indices: &[u64]) -> Rng {
    rng_from_seed(derive_seed(master, purpose, indices))
}
