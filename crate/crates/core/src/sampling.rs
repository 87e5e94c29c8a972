//! Quasi-random point sets (Owen-scrambled Sobol) on the torus, in balls and
//! on spheres. Every generator is a pure function of `(count, seed, stream)`.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::scalar::{norm_sq, Real};

/// Independent streams derived from one user seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Torus = 1,
    Ball = 2,
    Sphere = 3,
    Perturbation = 4,
    Coarse = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream_seed(seed: u64, stream: Stream) -> u32 {
    let h = splitmix64(seed ^ splitmix64(stream as u64));
    (h ^ (h >> 32)) as u32
}

/// The Sobol generator only supports `2^16` indices. Longer runs are split into
/// blocks of `2^16`, each a full set under its own scramble seed.
const BLOCK_BITS: u32 = 16;

#[inline]
fn sobol_raw(index: u32, dim: u32, seed: u32) -> f64 {
    let block = index >> BLOCK_BITS;
    let local = index & ((1 << BLOCK_BITS) - 1);
    let seed = if block == 0 {
        seed
    } else {
        let h = splitmix64(((seed as u64) << 32) | block as u64);
        (h ^ (h >> 32)) as u32
    };
    sobol_burley::sample(local, dim, seed) as f64
}

#[inline]
fn sobol<T: Real>(index: u32, dim: u32, seed: u32) -> T {
    T::lit(sobol_raw(index, dim, seed))
}

/// `count` points in `[0, 1)^n`.
pub fn unit_cube_points<T: Real>(n: usize, count: usize, seed: u64, stream: Stream) -> Vec<Vec<T>> {
    let s = stream_seed(seed, stream);
    (0..count as u32)
        .map(|i| (0..n as u32).map(|d| sobol(i, d, s)).collect())
        .collect()
}

/// `count` points of the torus `[0, 1)^n`.
pub fn torus_points<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    unit_cube_points(n, count, seed, Stream::Torus)
}

/// `count` points in the open ball `B(0, radius)`, by rejection from the cube.
pub fn ball_points<T: Real>(n: usize, radius: T, count: usize, seed: u64, stream: Stream) -> Vec<Vec<T>> {
    let s = stream_seed(seed, stream);
    let mut out = Vec::with_capacity(count);
    let mut i: u32 = 0;
    let two = T::lit(2.0);
    while out.len() < count {
        let p: Vec<T> = (0..n as u32)
            .map(|d| radius * (two * sobol::<T>(i, d, s) - T::one()))
            .collect();
        if norm_sq(&p) < radius * radius {
            out.push(p);
        }
        i = i.checked_add(1).expect("sobol index overflow");
    }
    out
}

/// `count` directions on `S^{n-1}` from Gaussian-mapped Sobol points.
pub fn sphere_points<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    let s = stream_seed(seed, Stream::Sphere);
    let normal = Normal::standard();
    let mut out = Vec::with_capacity(count);
    let mut i: u32 = 0;
    while out.len() < count {
        let g: Vec<f64> = (0..n as u32)
            .map(|d| {
                let u = sobol_raw(i, d, s).clamp(1e-12, 1.0 - 1e-12);
                normal.inverse_cdf(u)
            })
            .collect();
        let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 1e-9 {
            out.push(g.iter().map(|v| T::lit(v / len)).collect());
        }
        i += 1;
    }
    out
}
