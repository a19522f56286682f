//! Seeded sampling helpers. Everything runs on `ChaCha8Rng` so results are
//! identical across platforms for a given seed.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lcvs::{Curve, FourierTerm, PiecewiseCurve};
use crate::linalg::{self, Vector};
use crate::math;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn split(seed: u64, index: u64) -> Rng64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Standard normal sample (Box–Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector {
    (0..d).map(|_| gaussian(rng)).collect()
}

/// Uniform direction on the euclidean unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, d);
        let n = linalg::norm(&v);
        if n > 1e-12 {
            return linalg::scale(&v, 1.0 / n);
        }
    }
}

/// Flat Dirichlet weights on `n` parts (normalized exponentials).
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -math::ln(1.0 - rng.gen::<f64>())).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|x| x / total).collect()
}

/// A smooth curve `a + b t + Σ harmonics` with coefficients of size ~`scale`.
pub fn analytic_curve<R: Rng + ?Sized>(rng: &mut R, dim: usize, start: f64, end: f64, scale: f64) -> Result<Curve> {
    let mut g = |c: f64| linalg::scale(&gaussian_vector(rng, dim), c * scale);
    let poly = alloc::vec![g(0.5), g(0.5)];
    let terms = (0..2)
        .map(|k| FourierTerm {
            frequency: 1.0 + k as f64 * 1.5,
            cos: g(0.4),
            sin: g(0.4),
        })
        .collect();
    Curve::fourier(start, end, poly, terms)
}

/// Random polynomial of the given degree.
pub fn polynomial_curve<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    start: f64,
    end: f64,
    scale: f64,
) -> Result<Curve> {
    let coeffs = (0..=degree).map(|_| linalg::scale(&gaussian_vector(rng, dim), scale)).collect();
    Curve::polynomial(start, end, coeffs)
}

/// Random breakpoints with `segments` pieces, each piece constant or analytic.
pub fn piecewise_curve<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    start: f64,
    end: f64,
    segments: usize,
    constant: bool,
    scale: f64,
) -> Result<PiecewiseCurve> {
    let mut cuts: Vec<f64> = (1..segments)
        .map(|i| {
            let jitter: f64 = rng.gen_range(-0.3..0.3);
            start + (end - start) * (i as f64 + jitter) / segments as f64
        })
        .collect();
    cuts.insert(0, start);
    cuts.push(end);
    PiecewiseCurve::from_fn(cuts, |_, a, b| {
        if constant {
            Curve::constant(a, b, linalg::scale(&gaussian_vector(rng, dim), scale))
        } else {
            analytic_curve(rng, dim, a, b, scale)
        }
    })
}

/// A smooth increasing bijection of `[start, end]`:
/// `t + a·L/π·sin(π(t−start)/L)` with `|a| < 1`.
pub fn monotone_reparam<R: Rng + ?Sized>(rng: &mut R, start: f64, end: f64) -> Result<Curve> {
    let a: f64 = rng.gen_range(-0.8..0.8);
    let len = end - start;
    let w = core::f64::consts::PI / len;
    Curve::fourier(
        start,
        end,
        alloc::vec![alloc::vec![0.0], alloc::vec![1.0]],
        alloc::vec![FourierTerm {
            frequency: w,
            cos: alloc::vec![-a / w * math::sin(w * start)],
            sin: alloc::vec![a / w * math::cos(w * start)],
        }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a = gaussian_vector(&mut rng(7), 5);
        let b = gaussian_vector(&mut rng(7), 5);
        assert_eq!(a, b);
        assert_ne!(gaussian(&mut split(7, 1)), gaussian(&mut split(7, 2)));
    }

    #[test]
    fn reparam_fixes_ends_and_is_monotone() {
        let mut r = rng(11);
        for _ in 0..10 {
            let rho = monotone_reparam(&mut r, 0.5, 2.0).unwrap();
            assert!((rho.eval(0.5)[0] - 0.5).abs() < 1e-14);
            assert!((rho.eval(2.0)[0] - 2.0).abs() < 1e-14);
            for i in 0..=100 {
                assert!(rho.derivative(0.5 + 1.5 * i as f64 / 100.0, 1).unwrap()[0] > 0.0);
            }
        }
    }

    #[test]
    fn dirichlet_sums_to_one() {
        let w = dirichlet(&mut rng(3), 6);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
