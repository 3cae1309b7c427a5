//! Counter-based random streams.
//!
//! Every random draw in a trajectory comes from a ChaCha stream keyed by
//! `(seed, trajectory)` and selected by the segment index, so results do not
//! depend on how trajectories are scheduled across threads, and a segment's
//! draws do not depend on what happened in earlier segments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Trajectory key shared by all enumeration-mode runs.
pub const ENUMERATION_TRAJECTORY: u64 = u64::MAX;

pub fn stream(seed: u64, trajectory: u64, segment: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trajectory.to_le_bytes());
    key[16..24].copy_from_slice(b"steanesm");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(segment);
    rng
}
