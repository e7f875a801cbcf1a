//! Deterministic stream splitting for parallel sampling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns an RNG for logical stream `stream` of the master `seed`.
///
/// Streams are independent ChaCha streams, so work items (rows, walks,
/// restarts) can be sampled in parallel in any schedule while producing
/// output identical to a serial run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
