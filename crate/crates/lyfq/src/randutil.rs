//! Seeded randomness: splittable streams, Haar unitary sampling via Ginibre +
//! QR with phase correction, and Q-linearly independent direction synthesis.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::linalg::{householder_qr, CMat};

type C64 = Complex64;

/// Identifies a reproducible random stream. Identical `(seed, stream_id)`
/// reproduce identical draws bit-exactly across runs on the same build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededStream { seed, stream_id }
    }

    /// A counter-based generator pinned to this (seed, stream) pair.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut r = ChaCha12Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }

    pub fn substream(&self, stream_id: u64) -> SeededStream {
        SeededStream {
            seed: self.seed,
            stream_id,
        }
    }
}

/// Haar-distributed unitary: Ginibre draw, QR, then the diagonal of the
/// triangular factor is normalized to positive reals.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    assert!(n >= 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMat::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * inv_sqrt2, im * inv_sqrt2)
    });
    let (q, rdiag) = householder_qr(&g);
    // right-multiply by diag(r_jj / |r_jj|)
    let mut u = q;
    for j in 0..n {
        let d = rdiag[j];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

const SQUARE_FREE_SEEDS: [u32; 16] = [1, 2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// Direction vector `scale * (sqrt(p_1), ..., sqrt(p_n)) / sqrt(p_1)` where
/// the `p_j` are 1 and the first primes, permuted by the stream. Pairwise
/// ratios are irrational by construction (not verifiable numerically).
pub fn q_independent_direction(n: usize, scale: f64, stream: &SeededStream) -> Vec<f64> {
    assert!(n >= 1 && n <= SQUARE_FREE_SEEDS.len());
    let mut rng = stream.rng();
    let mut picks: Vec<u32> = SQUARE_FREE_SEEDS[..n].to_vec();
    picks.shuffle(&mut rng);
    let base = (picks[0] as f64).sqrt();
    picks
        .iter()
        .map(|&p| scale * (p as f64).sqrt() / base)
        .collect()
}
