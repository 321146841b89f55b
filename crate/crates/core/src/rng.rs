//! Seed derivation and the random streams shared by training, sampling and
//! data generation.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed derived from the
//! run seed by [`derive_seed`], a counter-based splitter: the child seed is a
//! pure function of `(parent, stream, index)`, so streams never depend on the
//! order in which they are created.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::Scalar;

pub type StreamRng = ChaCha8Rng;

/// Stream tags so that different consumers of one run seed never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Shuffle = 2,
    Noise = 3,
    Sample = 4,
    DataGen = 5,
    KidTrial = 6,
    Split = 7,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(parent: u64, stream: Stream, index: u64) -> u64 {
    let a = splitmix64(parent ^ splitmix64(stream as u64));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

pub fn stream(parent: u64, stream: Stream, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(parent, stream, index))
}

#[inline]
pub fn normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = StandardNormal.sample(rng);
    T::of(z)
}

pub fn fill_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R, out: &mut [T]) {
    for v in out {
        *v = normal(rng);
    }
}

pub fn normal_vec<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| normal(rng)).collect()
}

/// Gamma(1/2) as Z²/2 for Z standard normal.
pub fn gamma_half<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    0.5 * z * z
}

/// Gamma(k) for integer shape k as a sum of k unit exponentials.
pub fn gamma_int<R: Rng + ?Sized>(rng: &mut R, k: u32) -> f64 {
    (0..k).map(|_| <Exp1 as Distribution<f64>>::sample(&Exp1, rng)).sum::<f64>()
}

/// Beta(1/2, k) via the ratio of independent gamma variates.
pub fn beta_half_int<R: Rng + ?Sized>(rng: &mut R, k: u32) -> f64 {
    let g1 = gamma_half(rng);
    let g2 = gamma_int(rng, k);
    g1 / (g1 + g2)
}

/// Fisher-Yates permutation of `0..n`.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}
