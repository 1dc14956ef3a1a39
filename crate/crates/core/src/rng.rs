//! Seed derivation and the crate-wide reproducible RNG.
//!
//! All randomness fans out from a single 64-bit seed. A sub-seed for a given
//! purpose is SHA-256 over the little-endian seed bytes followed by the
//! purpose string; the first 32 bytes of the digest key a ChaCha8 stream.
//! Adding new purposes never perturbs existing streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The generator used everywhere randomness is needed.
pub type Rng = ChaCha8Rng;

/// Derive an independent RNG from `seed` for the named purpose.
pub fn derive_rng(seed: u64, purpose: &str) -> Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(purpose.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Derive a 64-bit sub-seed for the named purpose.
pub fn derive_seed(seed: u64, purpose: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(purpose.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
