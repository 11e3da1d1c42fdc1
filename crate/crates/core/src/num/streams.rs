//! Deterministic counter-based RNG substreams.
//!
//! Every Monte Carlo unit of work (one increment, one replicate) draws from
//! `ChaCha8` on its own stream index, so results are bit-identical no matter
//! how rayon partitions the work.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for work item `index` under master `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Work items are grouped in fixed-size batches; each batch gets one stream.
/// The batch size is a constant of the scheme, not of the thread pool, so
/// partitioning cannot change the output.
pub const BATCH: u64 = 4096;

/// RNG positioned at the start of the batch containing `index`; callers must
/// consume items of the batch in order.
pub fn batch_stream(seed: u64, batch_index: u64) -> ChaCha8Rng {
    substream(seed, batch_index)
}
