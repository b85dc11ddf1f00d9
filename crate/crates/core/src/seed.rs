//! Deterministic seed derivation. Every randomized stage draws from its own
//! ChaCha stream keyed by (base seed, stage tag, attempt index).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn derive(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = splitmix(seed);
    for b in tag.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    splitmix(h ^ index)
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(seed: u64, tag: &str, index: u64) -> Rng {
    rng(derive(seed, tag, index))
}
