//! Deterministic seed derivation.

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a base seed with a path of indices into an independent child seed.
///
/// The result depends on the order of `path`, so `(0, 1)` and `(1, 0)` give
/// different streams.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &k| splitmix64(acc ^ splitmix64(k.wrapping_add(0xA5A5_A5A5))))
}
