//! Monte Carlo experiments: BER/FER sweeps over Eb/N0 and the PAPR study of
//! the pre-coded OFDM transmitter.
//!
//! Every frame draws from its own ChaCha stream seeded by
//! [`frame_seed`]`(master, stream, index)`, so results depend only on the
//! master seed and never on scheduling or worker count.

pub mod papr;
pub mod sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use papr::{
    analytic_nyquist_ccdf, analytic_nyquist_papr_db, ccdf_quantile, papr_ccdf, papr_db,
    papr_samples, CcdfPoint, PaprConfig, PaprMode, PaprSimulator,
};
pub use sweep::{run_sweep, run_sweep_threads, write_sweep_csv, StopRule, SweepConfig, SweepRow};

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of frame `index` in sub-stream `stream` (e.g. the Eb/N0 grid point).
pub fn frame_seed(master: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(master ^ mix64(stream.wrapping_add(0x9E37_79B9_7F4A_7C15))) ^ index)
}

pub fn frame_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(frame_seed(master, stream, index))
}

/// Run `f` on a dedicated pool of `threads` workers (0 = all cores).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
