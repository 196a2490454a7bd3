//! Counter-based random streams.
//!
//! Every trial of an estimator owns a ChaCha8 stream keyed by the run seed and
//! selected by the trial index, so results do not depend on how trials are
//! scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used by all estimators.
pub type TrialRng = ChaCha8Rng;

/// Random stream for `(seed, stream)`.
///
/// The seed selects the ChaCha key and `stream` selects one of 2^64
/// independent streams under that key.
pub fn stream(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Pair of disjoint streams for trial `index`.
///
/// Used where two independent sources are required per trial (tree shape and
/// car arrivals), so each source can be replayed on its own.
pub fn stream_pair(seed: u64, index: u64) -> (TrialRng, TrialRng) {
    (stream(seed, 2 * index), stream(seed, 2 * index + 1))
}
