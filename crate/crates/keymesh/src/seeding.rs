//! Deterministic seed expansion and independent RNG substreams.
//!
//! Every randomized component derives its stream from a numeric seed plus a
//! textual tag and integer labels, so results are identical across runs,
//! platforms, and thread schedules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Expand a numeric seed into 32 bytes of master seed material.
pub fn expand_seed(seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"keymesh/seed/v1");
    h.update(seed.to_be_bytes());
    h.finalize().into()
}

/// Derive an independent, reproducible RNG stream for `(seed, tag, labels)`.
///
/// Distinct tags or labels yield statistically independent streams; the same
/// triple always yields the same stream regardless of what other streams were
/// drawn before it.
pub fn stream_rng(seed: u64, tag: &str, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_key(seed, tag, labels))
}

/// Collapse `(seed, tag, labels)` to a single u64 sub-seed.
pub fn sub_seed(seed: u64, tag: &str, labels: &[u64]) -> u64 {
    let key = stream_key(seed, tag, labels);
    u64::from_be_bytes(key[..8].try_into().expect("8-byte slice"))
}

fn stream_key(seed: u64, tag: &str, labels: &[u64]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"keymesh/stream/v1/");
    h.update(tag.as_bytes());
    h.update([0u8]);
    h.update(seed.to_be_bytes());
    for label in labels {
        h.update(label.to_be_bytes());
    }
    h.finalize().into()
}
