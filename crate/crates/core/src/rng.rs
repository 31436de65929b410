//! Counter-based random streams.
//!
//! Every Monte Carlo sample `i` of a run with master seed `s` draws from the
//! ChaCha8 stream `(s, i)`. The value of sample `i` therefore never depends
//! on which worker computes it or in what order, and ensembles are identical
//! under serial and parallel execution.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// The generator for sample `index` under master seed `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives an independent master seed for a named sub-task.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw on `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps `f` over sample indices `0..n`, each with its own stream.
///
/// Output order is the index order regardless of the `std` feature.
pub fn ensemble<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync + Send,
{
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| f(&mut stream(seed, i as u64), i))
            .collect()
    }
    #[cfg(not(feature = "std"))]
    {
        (0..n).map(|i| f(&mut stream(seed, i as u64), i)).collect()
    }
}

/// Deterministic parallel map over a slice (no randomness involved).
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "std"))]
    {
        items.iter().map(f).collect()
    }
}

/// Mean and standard error of the mean, summed in index order.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, libm::sqrt(var / n as f64))
}
