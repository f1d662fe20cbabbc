//! Deterministic random streams.
//!
//! Every stochastic routine in the crate takes a (seed, stream) pair and
//! derives an independent ChaCha8 stream from it. Monte Carlo loops give each
//! sample its own stream id, so results are bitwise independent of how the
//! samples are scheduled across worker threads.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The RNG used everywhere in this crate.
pub type StreamRng = ChaCha8Rng;

/// An independent stream for the given (seed, stream) pair.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on the open interval (0, 1).
pub fn open01(rng: &mut StreamRng) -> f64 {
    rng.sample::<f64, _>(Open01)
}

/// Standard exponential via inversion, E = −ln U.
pub fn std_exp(rng: &mut StreamRng) -> f64 {
    -open01(rng).ln()
}

/// Uniform on the open interval (−π/2, π/2).
pub fn uniform_angle(rng: &mut StreamRng) -> f64 {
    std::f64::consts::PI * (open01(rng) - 0.5)
}
