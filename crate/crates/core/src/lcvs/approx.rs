use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::lcvs::{Curve, Order, PiecewiseCurve, Seminorm};
use crate::linalg::{self, Vector};
use crate::math;
use crate::quadrature::{self, CompositeGauss, SIMPSON_TOLERANCE};

/// Default number of uniform grid points for grid suprema.
pub const DEFAULT_GRID: usize = 1025;

/// A grid supremum: a lower bound for the true supremum.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSup {
    pub value: f64,
    pub grid_points: usize,
    /// Where the maximum was attained and for which derivative order.
    pub argmax: f64,
    pub argmax_order: usize,
}

/// `sup_t max_{m ≤ s} p(c⁽ᵐ⁾(t))` over `grid` uniform points.
pub fn ck_seminorm(c: &Curve, p: &Seminorm, s: usize, grid: usize) -> Result<GridSup> {
    let grid = grid.max(2);
    let mut best = GridSup {
        value: 0.0,
        grid_points: grid,
        argmax: c.start(),
        argmax_order: 0,
    };
    for i in 0..grid {
        let t = c.start() + c.length() * i as f64 / (grid - 1) as f64;
        for (m, v) in c.jet(t, s)?.iter().enumerate() {
            let val = p.eval(v);
            if val > best.value {
                best.value = val;
                best.argmax = t;
                best.argmax_order = m;
            }
        }
    }
    Ok(best)
}

/// Piecewise-linear interpolant on `n` uniform segments.
pub fn polygon_approx(c: &Curve, n: usize) -> Result<PiecewiseCurve> {
    if n == 0 {
        return Err(Error::InvalidArgument("polygon needs at least one segment".into()));
    }
    let nodes: Vec<f64> = (0..=n)
        .map(|i| if i == n { c.end() } else { c.start() + c.length() * i as f64 / n as f64 })
        .collect();
    let values: Vec<Vector> = nodes.iter().map(|&t| c.eval(t)).collect();
    PiecewiseCurve::from_fn(nodes.clone(), |p, a, b| {
        let slope = linalg::scale(&linalg::sub(&values[p + 1], &values[p]), 1.0 / (b - a));
        let offset = linalg::sub(&values[p], &linalg::scale(&slope, a));
        Curve::linear(a, b, offset, slope)
    })
}

/// The standard bump `u ↦ c₀·exp(−1/(1−u²))` on `(−1, 1)`, normalized to
/// unit integral. `ρₙ(v) = n·profile(n·v)`.
#[derive(Clone, Debug)]
pub struct Mollifier {
    c0: f64,
}

/// The shared normalized mollifier.
pub fn mollifier() -> Mollifier {
    let raw = bump_rule().integrate(|u| bump_jet(u, 0).value(), -1.0, 1.0);
    Mollifier { c0: 1.0 / raw }
}

/// Quadrature rule for bump integrands; 32 panels alias the second
/// derivative at the 1e-8 level, 64 reach roundoff.
pub(crate) fn bump_rule() -> CompositeGauss {
    CompositeGauss::new(64, 12)
}

fn bump_jet(u: f64, order: usize) -> Jet {
    if u.abs() >= 1.0 {
        return Jet::constant(0.0, order);
    }
    let x = Jet::variable(u, order);
    Jet::constant(1.0, order).sub(&x.mul(&x)).recip().scale(-1.0).exp()
}

impl Mollifier {
    pub fn normalization(&self) -> f64 {
        self.c0
    }

    /// Derivatives `0..=order` of the normalized profile at `u`.
    pub fn profile(&self, u: f64, order: usize) -> Vec<f64> {
        bump_jet(u, order).scale(self.c0).derivatives()
    }

    /// `ρₙ(v)`
    pub fn rho(&self, n: f64, v: f64) -> f64 {
        n * self.profile(n * v, 0)[0]
    }
}

/// Input of a convolution: values on an interval, extended constantly, with
/// the points where it may fail to be smooth.
struct Source {
    start: f64,
    end: f64,
    dim: usize,
    kinks: Vec<f64>,
    eval: Arc<dyn Fn(f64) -> Vector + Send + Sync>,
}

impl Source {
    fn value(&self, t: f64) -> Vector {
        (self.eval)(t.clamp(self.start, self.end))
    }
}

/// `t ↦ ∫ ρₙ(t − s)·c(s) ds` with `c` extended constantly beyond its interval.
pub fn convolve(c: &Curve, n: usize) -> Result<Curve> {
    let cc = c.clone();
    convolve_source(
        Source {
            start: c.start(),
            end: c.end(),
            dim: c.dim(),
            kinks: vec![c.start(), c.end()],
            eval: Arc::new(move |t| cc.eval(t)),
        },
        n,
    )
}

/// [`convolve`] for piecewise input; breakpoints are treated as kinks.
pub fn convolve_piecewise(pw: &PiecewiseCurve, n: usize) -> Result<Curve> {
    let p = pw.clone();
    convolve_source(
        Source {
            start: pw.start(),
            end: pw.end(),
            dim: pw.dim(),
            kinks: pw.breakpoints().to_vec(),
            eval: Arc::new(move |t| p.eval(t)),
        },
        n,
    )
}

fn convolve_source(src: Source, n: usize) -> Result<Curve> {
    if n == 0 {
        return Err(Error::InvalidArgument("mollifier index must be positive".into()));
    }
    let moll = mollifier();
    let rule = bump_rule();
    let nf = n as f64;
    let (start, end, dim) = (src.start, src.end, src.dim);
    Ok(Curve::from_parts(start, end, dim, Order::Smooth, move |t, s| {
        // substitute u = n(t − σ): (χ*ρₙ)⁽ᵐ⁾(t) = nᵐ ∫ profile⁽ᵐ⁾(u) χ(t − u/n) du
        let mut cuts: Vec<f64> = vec![-1.0, 1.0];
        for k in &src.kinks {
            let u = nf * (t - k);
            if u > -1.0 && u < 1.0 {
                cuts.push(u);
            }
        }
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        let mut out = vec![linalg::zeros(dim); s + 1];
        for w in cuts.windows(2) {
            rule.for_each_node(w[0], w[1], |u, wt| {
                let prof = moll.profile(u, s);
                let v = src.value(t - u / nf);
                for (m, o) in out.iter_mut().enumerate() {
                    linalg::axpy(o, wt * prof[m] * math::powi(nf, m as i32), &v);
                }
            });
        }
        out
    }))
}

/// `I[p](X₁, …, X_p, c)`: the `p`-fold antiderivative whose derivatives of
/// order `p−1, …, 0` at the left end are `X₁, …, X_p`.
///
/// Closed form `Σⱼ Xⱼ (t−r)^{p−j}/(p−j)! + ∫ᵣᵗ (t−s)^{p−1}/(p−1)! c(s) ds`.
pub fn iterated_integrate(xs: &[Vector], c: &Curve) -> Result<Curve> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("iterated integration needs p ≥ 1".into()));
    }
    for x in xs {
        if x.len() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim(),
                found: x.len(),
            });
        }
    }
    let p = xs.len();
    let xs: Vec<Vector> = xs.to_vec();
    let cc = c.clone();
    let (r, dim) = (c.start(), c.dim());
    let level = move |q: usize, t: f64| -> Vector {
        let mut out = linalg::zeros(dim);
        for (j, x) in xs.iter().take(q).enumerate() {
            let k = q - 1 - j;
            linalg::axpy(&mut out, math::powi(t - r, k as i32) / math::factorial(k), x);
        }
        let kernel = math::factorial(q - 1);
        let integral = quadrature::simpson(
            |s| linalg::scale(&cc.eval(s), math::powi(t - s, (q - 1) as i32) / kernel),
            r,
            t,
            dim,
            SIMPSON_TOLERANCE,
        )
        .unwrap_or_else(|_| alloc::vec![f64::NAN; dim]);
        linalg::axpy(&mut out, 1.0, &integral);
        out
    };
    let inner = c.clone();
    Ok(Curve::from_parts(c.start(), c.end(), dim, c.order().plus(p), move |t, s| {
        (0..=s)
            .map(|m| {
                if m < p {
                    level(p - m, t)
                } else {
                    inner.raw_jet(t, m - p).swap_remove(m - p)
                }
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcvs::FourierTerm;

    #[test]
    fn mollifier_is_normalized() {
        let m = mollifier();
        assert!((m.normalization() - 2.2523).abs() < 1e-3);
        let rule = bump_rule();
        let total = rule.integrate(|u| m.profile(u, 0)[0], -1.0, 1.0);
        assert!((total - 1.0).abs() < 1e-14);
        for k in 1..4 {
            assert!(rule.integrate(|u| m.profile(u, 3)[k], -1.0, 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_nodes() {
        let c = Curve::polynomial(0.0, 1.0, vec![vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        let pw = polygon_approx(&c, 2).unwrap();
        assert_eq!(pw.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(pw.eval(0.5), vec![0.25]);
        assert!((pw.eval(1.0)[0] - 1.0).abs() < 1e-15);
        assert!((pw.eval(0.25)[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn convolution_keeps_constants_and_lines() {
        let c = Curve::constant(0.0, 1.0, vec![3.0, -1.0]).unwrap();
        let s = convolve(&c, 4).unwrap();
        let v = s.eval(0.1);
        assert!((v[0] - 3.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
        let l = Curve::linear(0.0, 1.0, vec![0.5], vec![2.0]).unwrap();
        let s = convolve(&l, 8).unwrap();
        assert!((s.eval(0.5)[0] - 1.5).abs() < 1e-12);
        assert!((s.derivative(0.5, 1).unwrap()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_derivatives_are_consistent() {
        let c = Curve::fourier(
            0.0,
            1.0,
            vec![],
            vec![FourierTerm {
                frequency: 3.0,
                cos: vec![1.0],
                sin: vec![0.0],
            }],
        )
        .unwrap();
        let s = convolve(&c, 16).unwrap();
        assert!(s.derivative_consistency(2, 8, 1e-3).unwrap() < 1e-7);
    }

    #[test]
    fn iterated_integration_reconstructs_cubic() {
        // φ = 1 + t³ on [0, 2]: φ(0) = 1, φ'(0) = φ''(0) = 0, φ''' = 6
        let six = Curve::constant(0.0, 2.0, vec![6.0]).unwrap();
        let i3 = iterated_integrate(&[vec![0.0], vec![0.0], vec![1.0]], &six).unwrap();
        let t: f64 = 1.3;
        assert!((i3.eval(t)[0] - (1.0 + t * t * t)).abs() < 1e-12);
        assert!((i3.derivative(t, 1).unwrap()[0] - 3.0 * t * t).abs() < 1e-12);
        assert!((i3.derivative(t, 3).unwrap()[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn grid_supremum_of_sine() {
        let c = Curve::fourier(
            0.0,
            1.0,
            vec![],
            vec![FourierTerm {
                frequency: 4.0,
                cos: vec![0.0, 0.0],
                sin: vec![1.0, 0.0],
            }],
        )
        .unwrap();
        let g = ck_seminorm(&c, &Seminorm::Euclidean, 2, DEFAULT_GRID).unwrap();
        assert!((g.value - 16.0).abs() < 1e-4);
        assert_eq!(g.argmax_order, 2);
    }
}
