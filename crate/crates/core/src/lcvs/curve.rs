use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::jet::{self, Jet};
use crate::linalg::{self, Vector};
use crate::math;

/// Differentiability class of a [`Curve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    /// Analytic derivatives of every order are available.
    Smooth,
}

impl Order {
    pub fn allows(self, s: usize) -> bool {
        match self {
            Order::Finite(k) => s <= k,
            Order::Smooth => true,
        }
    }

    pub fn plus(self, p: usize) -> Order {
        match self {
            Order::Finite(k) => Order::Finite(k + p),
            Order::Smooth => Order::Smooth,
        }
    }

    pub fn minus(self, p: usize) -> Order {
        match self {
            Order::Finite(k) => Order::Finite(k.saturating_sub(p)),
            Order::Smooth => Order::Smooth,
        }
    }

    pub fn min(self, other: Order) -> Order {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a.min(b)),
            (Order::Finite(a), Order::Smooth) | (Order::Smooth, Order::Finite(a)) => Order::Finite(a),
            (Order::Smooth, Order::Smooth) => Order::Smooth,
        }
    }
}

/// Evaluation procedure of a curve: `(t, s) ↦ [c(t), c'(t), …, c⁽ˢ⁾(t)]`.
pub type CurveFn = dyn Fn(f64, usize) -> Vec<Vector> + Send + Sync;

/// One harmonic `cos·cos(ωt) + sin·sin(ωt)` of a [`Curve::fourier`] curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTerm {
    pub frequency: f64,
    pub cos: Vector,
    pub sin: Vector,
}

/// A curve `[start, end] → ℝᵈ` with derivatives up to its declared order.
#[derive(Clone)]
pub struct Curve {
    start: f64,
    end: f64,
    dim: usize,
    order: Order,
    f: Arc<CurveFn>,
    constant: Option<Vector>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("start", &self.start)
            .field("end", &self.end)
            .field("dim", &self.dim)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

pub(crate) fn check_interval(start: f64, end: f64) -> Result<()> {
    if !(start.is_finite() && end.is_finite() && start < end) {
        return Err(Error::InvalidInterval { start, end });
    }
    Ok(())
}

impl Curve {
    /// Wraps an evaluation procedure returning the derivatives `0..=s`.
    pub fn new<F>(start: f64, end: f64, dim: usize, order: Order, f: F) -> Result<Self>
    where
        F: Fn(f64, usize) -> Vec<Vector> + Send + Sync + 'static,
    {
        check_interval(start, end)?;
        Ok(Self::from_parts(start, end, dim, order, f))
    }

    pub(crate) fn from_parts<F>(start: f64, end: f64, dim: usize, order: Order, f: F) -> Self
    where
        F: Fn(f64, usize) -> Vec<Vector> + Send + Sync + 'static,
    {
        Self {
            start,
            end,
            dim,
            order,
            f: Arc::new(f),
            constant: None,
        }
    }

    /// A continuous curve known only through its values.
    pub fn from_values<F>(start: f64, end: f64, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Vector + Send + Sync + 'static,
    {
        Self::new(start, end, dim, Order::Finite(0), move |t, _| vec![f(t)])
    }

    /// A curve of the given order whose derivatives are central differences
    /// of its values (second-order accurate, step `len·ε^{1/(s+2)}`).
    pub fn from_values_fd<F>(start: f64, end: f64, dim: usize, order: Order, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Vector + Send + Sync + 'static,
    {
        let len = end - start;
        Self::new(start, end, dim, order, move |t, s| {
            let mut out = alloc::vec![f(t)];
            for m in 1..=s {
                let h = len * math::powf(f64::EPSILON, 1.0 / (m as f64 + 2.0));
                let mut acc = linalg::zeros(dim);
                let mut binom = 1.0;
                for k in 0..=m {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let x = t + (0.5 * m as f64 - k as f64) * h;
                    linalg::axpy(&mut acc, sign * binom, &f(x));
                    binom = binom * (m - k) as f64 / (k + 1) as f64;
                }
                out.push(linalg::scale(&acc, 1.0 / math::powi(h, m as i32)));
            }
            out
        })
    }

    pub fn constant(start: f64, end: f64, value: Vector) -> Result<Self> {
        check_interval(start, end)?;
        let dim = value.len();
        let v = value.clone();
        let mut c = Self::from_parts(start, end, dim, Order::Smooth, move |_, s| {
            let mut out = vec![v.clone()];
            out.extend((0..s).map(|_| linalg::zeros(dim)));
            out
        });
        c.constant = Some(value);
        Ok(c)
    }

    pub fn zero(start: f64, end: f64, dim: usize) -> Result<Self> {
        Self::constant(start, end, linalg::zeros(dim))
    }

    /// `t ↦ Σⱼ cⱼ tʲ`
    pub fn polynomial(start: f64, end: f64, coeffs: Vec<Vector>) -> Result<Self> {
        Self::fourier(start, end, coeffs, Vec::new())
    }

    /// `t ↦ a + t·b`
    pub fn linear(start: f64, end: f64, a: Vector, b: Vector) -> Result<Self> {
        Self::polynomial(start, end, vec![a, b])
    }

    /// A polynomial part `Σⱼ cⱼ tʲ` plus harmonics `Σ (aₖ cos ωₖt + bₖ sin ωₖt)`.
    pub fn fourier(start: f64, end: f64, poly: Vec<Vector>, terms: Vec<FourierTerm>) -> Result<Self> {
        check_interval(start, end)?;
        let dim = poly
            .first()
            .map(|v| v.len())
            .or_else(|| terms.first().map(|t| t.cos.len()))
            .ok_or_else(|| Error::InvalidArgument("curve needs at least one coefficient".into()))?;
        for v in poly.iter().chain(terms.iter().flat_map(|t| [&t.cos, &t.sin])) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        if poly.len() <= 1 && terms.is_empty() {
            return Self::constant(start, end, poly.into_iter().next().unwrap_or_else(|| linalg::zeros(dim)));
        }
        Ok(Self::from_parts(start, end, dim, Order::Smooth, move |t, s| {
            (0..=s)
                .map(|m| {
                    let mut out = linalg::zeros(dim);
                    // d^m/dt^m t^j = j!/(j-m)! t^(j-m)
                    for (j, c) in poly.iter().enumerate().skip(m) {
                        let mut falling = 1.0;
                        for i in 0..m {
                            falling *= (j - i) as f64;
                        }
                        linalg::axpy(&mut out, falling * math::powi(t, (j - m) as i32), c);
                    }
                    for term in &terms {
                        let w = term.frequency;
                        let wm = math::powi(w, m as i32);
                        let (c, sn) = (math::cos(w * t), math::sin(w * t));
                        // derivatives cycle: cos → -sin → -cos → sin
                        let (dc, ds) = match m % 4 {
                            0 => (c, sn),
                            1 => (-sn, c),
                            2 => (-c, -sn),
                            _ => (sn, -c),
                        };
                        linalg::axpy(&mut out, wm * dc, &term.cos);
                        linalg::axpy(&mut out, wm * ds, &term.sin);
                    }
                    out
                })
                .collect()
        }))
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// The value of a curve built by [`Curve::constant`].
    pub fn constant_value(&self) -> Option<&Vector> {
        self.constant.as_ref()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn eval(&self, t: f64) -> Vector {
        (self.f)(t, 0).swap_remove(0)
    }

    /// The `s`-th derivative at `t`.
    pub fn derivative(&self, t: f64, s: usize) -> Result<Vector> {
        Ok(self.jet(t, s)?.swap_remove(s))
    }

    /// Derivatives `0..=s` at `t`.
    pub fn jet(&self, t: f64, s: usize) -> Result<Vec<Vector>> {
        if !self.order.allows(s) {
            return Err(Error::OrderExceeded {
                requested: s,
                declared: match self.order {
                    Order::Finite(k) => k,
                    Order::Smooth => usize::MAX,
                },
            });
        }
        Ok((self.f)(t, s))
    }

    /// Raw access to the evaluation procedure, without the order check.
    pub(crate) fn raw_jet(&self, t: f64, s: usize) -> Vec<Vector> {
        (self.f)(t, s)
    }

    /// First derivative, falling back to a fourth-order central difference
    /// (one-sided at the ends) for curves of order zero.
    pub fn velocity(&self, t: f64) -> Vector {
        if self.order.allows(1) {
            return (self.f)(t, 1).swap_remove(1);
        }
        let h = 1e-4 * self.length();
        fd_derivative(|x| self.eval(x), t, h, self.start, self.end)
    }

    /// Same curve on a new interval of equal position (no time shift).
    pub fn restrict(&self, a: f64, b: f64) -> Result<Curve> {
        check_interval(a, b)?;
        let mut c = self.clone();
        c.start = a;
        c.end = b;
        Ok(c)
    }

    /// Pointwise linear image `t ↦ L(c(t))`; derivatives commute with `L`.
    pub fn map_linear<L>(&self, out_dim: usize, map: L) -> Curve
    where
        L: Fn(&[f64]) -> Vector + Send + Sync + 'static,
    {
        let f = self.f.clone();
        let constant = self.constant.as_ref().map(|v| map(v));
        let mut c = Self::from_parts(self.start, self.end, out_dim, self.order, move |t, s| {
            f(t, s).iter().map(|v| map(v)).collect()
        });
        c.constant = constant;
        c
    }

    pub fn scale(&self, factor: f64) -> Curve {
        self.map_linear(self.dim, move |v| linalg::scale(v, factor))
    }

    /// Pointwise sum on the intersection of both intervals.
    pub fn add(&self, other: &Curve) -> Result<Curve> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (a, b) = (self.start.max(other.start), self.end.min(other.end));
        check_interval(a, b)?;
        let (f, g) = (self.f.clone(), other.f.clone());
        Ok(Self::from_parts(a, b, self.dim, self.order.min(other.order), move |t, s| {
            f(t, s).iter().zip(g(t, s)).map(|(x, y)| linalg::add(x, &y)).collect()
        }))
    }

    pub fn sub(&self, other: &Curve) -> Result<Curve> {
        self.add(&other.scale(-1.0))
    }

    /// `t ↦ c(start + end − t)`
    pub fn reflect(&self) -> Curve {
        let f = self.f.clone();
        let (r, r2) = (self.start, self.end);
        Self::from_parts(self.start, self.end, self.dim, self.order, move |t, s| {
            f(r + r2 - t, s)
                .into_iter()
                .enumerate()
                .map(|(m, v)| if m % 2 == 1 { linalg::scale(&v, -1.0) } else { v })
                .collect()
        })
    }

    /// Composition `c ∘ ϱ` for a scalar curve `ϱ` taking values in the
    /// interval of `c`.
    pub fn compose(&self, rho: &Curve) -> Result<Curve> {
        if rho.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: rho.dim,
            });
        }
        let (f, g) = (self.f.clone(), rho.f.clone());
        Ok(Self::from_parts(rho.start, rho.end, self.dim, self.order.min(rho.order), move |t, s| {
            let inner: Vec<f64> = g(t, s).into_iter().map(|v| v[0]).collect();
            let outer = f(inner[0], s);
            jet::compose_vector(&outer, &Jet::from_derivatives(&inner))
        }))
    }

    /// The substituted curve `ϱ̇ · (c ∘ ϱ)` whose product integral over the
    /// domain of `ϱ` equals that of `c` over its image.
    pub fn substitute(&self, rho: &Curve) -> Result<Curve> {
        if !rho.order.allows(1) {
            return Err(Error::OrderExceeded {
                requested: 1,
                declared: 0,
            });
        }
        let composed = self.compose(rho)?;
        let (h, g) = (composed.f.clone(), rho.f.clone());
        let order = composed.order.min(rho.order.minus(1));
        Ok(Self::from_parts(rho.start, rho.end, self.dim, order, move |t, s| {
            let r: Vec<f64> = g(t, s + 1).into_iter().skip(1).map(|v| v[0]).collect();
            jet::scalar_times_vector(&Jet::from_derivatives(&r), &h(t, s))
        }))
    }

    /// Largest mismatch between the declared derivative of order `s + 1` and
    /// a fourth-order central difference of the order-`s` evaluation, over
    /// `points` interior points and every `s` below `max_order`.
    pub fn derivative_consistency(&self, max_order: usize, points: usize, h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in 0..max_order {
            if !self.order.allows(s + 1) {
                return Err(Error::OrderExceeded {
                    requested: s + 1,
                    declared: max_order,
                });
            }
            for i in 0..points {
                let t = self.start + 2.0 * h + (self.length() - 4.0 * h) * (i as f64 + 0.5) / points as f64;
                let fd = central_difference(|x| (self.f)(x, s).swap_remove(s), t, h);
                let exact = (self.f)(t, s + 1).swap_remove(s + 1);
                worst = worst.max(linalg::max_abs(&linalg::sub(&fd, &exact)));
            }
        }
        Ok(worst)
    }
}

/// Fourth-order central difference `f'(t)` with step `h`.
pub fn central_difference<F: Fn(f64) -> Vector>(f: F, t: f64, h: f64) -> Vector {
    let (a, b, c, d) = (f(t - 2.0 * h), f(t - h), f(t + h), f(t + 2.0 * h));
    a.iter()
        .zip(&b)
        .zip(c.iter().zip(&d))
        .map(|((a, b), (c, d))| (a - 8.0 * b + 8.0 * c - d) / (12.0 * h))
        .collect()
}

/// Fourth-order finite difference on `[lo, hi]`: central where the stencil
/// fits, one-sided five-point stencils at the ends.
pub fn fd_derivative<F: Fn(f64) -> Vector>(f: F, t: f64, h: f64, lo: f64, hi: f64) -> Vector {
    if t - 2.0 * h >= lo && t + 2.0 * h <= hi {
        return central_difference(f, t, h);
    }
    let dir = if t - 2.0 * h < lo { 1.0 } else { -1.0 };
    let hh = dir * h;
    let vals: Vec<Vector> = (0..5).map(|k| f(t + k as f64 * hh)).collect();
    let w = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let mut out = linalg::zeros(vals[0].len());
    for (wk, v) in w.iter().zip(&vals) {
        linalg::axpy(&mut out, wk / (12.0 * hh), v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // (t, t²) on [0, 1]
        let c = Curve::polynomial(0.0, 1.0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(c.eval(0.5), vec![0.5, 0.25]);
        assert_eq!(c.derivative(0.5, 1).unwrap(), vec![1.0, 1.0]);
        assert_eq!(c.derivative(0.5, 2).unwrap(), vec![0.0, 2.0]);
        assert_eq!(c.derivative(0.5, 3).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn fourier_derivative_cycle() {
        let c = Curve::fourier(
            0.0,
            1.0,
            Vec::new(),
            vec![FourierTerm {
                frequency: 2.0,
                cos: vec![0.0],
                sin: vec![1.0],
            }],
        )
        .unwrap();
        let t = 0.3;
        assert!((c.derivative(t, 1).unwrap()[0] - 2.0 * math::cos(2.0 * t)).abs() < 1e-15);
        assert!((c.derivative(t, 2).unwrap()[0] + 4.0 * math::sin(2.0 * t)).abs() < 1e-14);
        assert!((c.derivative(t, 3).unwrap()[0] + 8.0 * math::cos(2.0 * t)).abs() < 1e-14);
        assert!(c.derivative_consistency(3, 20, 1e-3).unwrap() < 1e-9);
    }

    #[test]
    fn order_is_enforced() {
        let c = Curve::from_values(0.0, 1.0, 1, |t| vec![t]).unwrap();
        assert!(matches!(c.derivative(0.5, 1), Err(Error::OrderExceeded { .. })));
        assert!(matches!(
            Curve::constant(1.0, 0.0, vec![1.0]),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn substitution_uses_chain_rule() {
        // c(t) = (t²), ϱ(t) = t³ on [0,1]: ϱ̇·c∘ϱ = 3t²·t⁶ = 3t⁸
        let c = Curve::polynomial(0.0, 1.0, vec![vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        let rho = Curve::polynomial(0.0, 1.0, vec![vec![0.0], vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        let s = c.substitute(&rho).unwrap();
        let t: f64 = 0.7;
        assert!((s.eval(t)[0] - 3.0 * t.powi(8)).abs() < 1e-14);
        assert!((s.derivative(t, 1).unwrap()[0] - 24.0 * t.powi(7)).abs() < 1e-13);
        assert!((s.derivative(t, 2).unwrap()[0] - 168.0 * t.powi(6)).abs() < 1e-12);
    }

    #[test]
    fn one_sided_difference_at_the_ends() {
        let f = |t: f64| vec![t * t * t];
        let d = fd_derivative(f, 0.0, 1e-3, 0.0, 1.0);
        assert!(d[0].abs() < 1e-10);
        let d = fd_derivative(f, 1.0, 1e-3, 0.0, 1.0);
        assert!((d[0] - 3.0).abs() < 1e-9);
    }
}
