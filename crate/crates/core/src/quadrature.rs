//! Quadrature rules and summation helpers.

use std::num::NonZeroUsize;

use gauss_quad::jacobi::GaussJacobi;
use gauss_quad::legendre::GaussLegendre;
use gauss_quad::FiniteAboveNegOneF64;

use crate::scalar::{unit_ball_volume, Real};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order).expect("quadrature order >= 1");
    let mut pairs = GaussLegendre::new(order).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs
}

/// Integrates `f` over `[a, b]` with a fixed Gauss-Legendre rule.
pub fn integrate_panel<T: Real>(rule: &[(f64, f64)], a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    let mut acc = T::zero();
    for &(x, w) in rule {
        acc = acc + T::lit(w) * f(mid + half * T::lit(x));
    }
    acc * half
}

/// Sums `f(0) + ... + f(len - 1)` by recursive halving.
///
/// The reduction tree depends only on `len`, so results are reproducible.
pub fn pairwise_sum<A, F>(len: usize, f: &F) -> A
where
    A: Copy + std::ops::Add<Output = A> + num_traits::Zero,
    F: Fn(usize) -> A,
{
    fn go<A, F>(lo: usize, hi: usize, f: &F) -> A
    where
        A: Copy + std::ops::Add<Output = A> + num_traits::Zero,
        F: Fn(usize) -> A,
    {
        if hi - lo <= 8 {
            let mut acc = A::zero();
            for i in lo..hi {
                acc = acc + f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, len, f)
}

/// Pairwise sum of a slice.
pub fn pairwise_sum_slice<A>(values: &[A]) -> A
where
    A: Copy + std::ops::Add<Output = A> + num_traits::Zero,
{
    pairwise_sum(values.len(), &|i| values[i])
}

/// Gauss-Jacobi nodes and weights on `[-1, 1]` for `(1 - x)^alpha (1 + x)^beta`.
pub fn gauss_jacobi(order: usize, alpha: f64, beta: f64) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order).expect("quadrature order >= 1");
    let a = FiniteAboveNegOneF64::new(alpha).expect("jacobi alpha > -1");
    let b = FiniteAboveNegOneF64::new(beta).expect("jacobi beta > -1");
    let mut pairs = GaussJacobi::new(order, a, b).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs
}

/// Product rule on the ball `B(0, radius)` in polar coordinates.
///
/// The radius gets `order` Gauss-Jacobi nodes for the weight `r^{dim-1}`, every
/// polar angle `order` Gauss-Gegenbauer nodes in `cos a`, the last azimuth
/// `2 order` equispaced nodes. Weights are rescaled to sum to the exact ball
/// volume.
#[derive(Clone, Debug)]
pub struct BallRule<T> {
    dim: usize,
    /// Node offsets, `dim` entries per node.
    offsets: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> BallRule<T> {
    pub fn new(dim: usize, radius: T, order: usize) -> Self {
        assert!(dim >= 2, "ball rule needs dim >= 2");
        let pi = std::f64::consts::PI;

        // unit sphere S^{dim-1}, built up from the circle
        let azimuth = 2 * order;
        let mut sphere: Vec<(Vec<f64>, f64)> = (0..azimuth)
            .map(|j| {
                let phi = 2.0 * pi * (j as f64 + 0.5) / azimuth as f64;
                (vec![phi.cos(), phi.sin()], 2.0 * pi / azimuth as f64)
            })
            .collect();
        for d in 3..=dim {
            // S^{d-1}: (t, sqrt(1 - t^2) y), y on S^{d-2}, measure (1 - t^2)^{(d-3)/2} dt
            let ex = 0.5 * (d as f64 - 3.0);
            let rule = gauss_jacobi(order, ex, ex);
            let mut next = Vec::with_capacity(sphere.len() * rule.len());
            for &(t, wt) in &rule {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (y, wy) in &sphere {
                    let mut p = Vec::with_capacity(d);
                    p.push(t);
                    p.extend(y.iter().map(|c| c * s));
                    next.push((p, wt * wy));
                }
            }
            sphere = next;
        }

        let rad = radius.as_f64();
        let radial = gauss_jacobi(order, 0.0, dim as f64 - 1.0);
        let scale = (0.5 * rad).powi(dim as i32);
        let mut offsets = Vec::with_capacity(sphere.len() * radial.len() * dim);
        let mut weights = Vec::with_capacity(sphere.len() * radial.len());
        for &(x, w) in &radial {
            let r = 0.5 * rad * (x + 1.0);
            for (dir, wd) in &sphere {
                offsets.extend(dir.iter().map(|c| T::lit(c * r)));
                weights.push(scale * w * wd);
            }
        }
        let total: f64 = weights.iter().sum();
        let exact = unit_ball_volume::<f64>(dim) * rad.powi(dim as i32);
        let weights = weights.iter().map(|w| T::lit(w * exact / total)).collect();
        BallRule {
            dim,
            offsets,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, i: usize) -> &[T] {
        &self.offsets[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.offsets
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }
}
