//! Seeded randomness. Every sampler takes an explicit seed; child streams are
//! derived with splitmix64 so that concurrent runs stay reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `stream`-th child of `seed`.
pub fn split(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Deterministic seed derived from a list of floats (used by `through`
/// queries, which have no seed argument of their own).
pub fn seed_from_f64s(values: &[f64]) -> u64 {
    values
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, v| splitmix64(acc ^ v.to_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_streams_differ() {
        assert_ne!(split(0, 0), split(0, 1));
        assert_ne!(split(0, 0), split(1, 0));
        assert_eq!(split(7, 3), split(7, 3));
    }
}
