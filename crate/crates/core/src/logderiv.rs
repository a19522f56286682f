//! Group-valued curves and their right logarithmic derivative
//! `Der(μ) = μ̇·μ⁻¹`, with residual checks of its product, inverse,
//! quotient and substitution rules.
//!
//! When a [`GroupCurve`] carries an analytic tangent, `Der` is exact up to
//! rounding; otherwise the tangent is a fourth-order central difference
//! with step `1e-4·(r' − r)` and residuals should be read against the looser
//! [`FD_TOLERANCE`].

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::adjoint;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::lcvs::{fd_derivative, Curve, Order};
use crate::linalg::{self, Vector};

/// Residual tolerance for curves with analytic tangents.
pub const ANALYTIC_TOLERANCE: f64 = 1e-8;
/// Residual tolerance when tangents come from finite differences.
pub const FD_TOLERANCE: f64 = 1e-5;
/// Default number of grid points for sup residuals.
pub const RESIDUAL_GRID: usize = 101;

type ElemFn = dyn Fn(f64) -> GroupElement + Send + Sync;
type TangentFn = dyn Fn(f64) -> Vector + Send + Sync;

/// A curve `[r, r'] → G` of class `Cᵏ`, `k ≥ 1`.
#[derive(Clone)]
pub struct GroupCurve {
    group: GroupSpec,
    start: f64,
    end: f64,
    order: Order,
    eval: Arc<ElemFn>,
    tangent: Option<Arc<TangentFn>>,
}

impl fmt::Debug for GroupCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupCurve")
            .field("group", &self.group.name())
            .field("start", &self.start)
            .field("end", &self.end)
            .field("order", &self.order)
            .field("analytic", &self.tangent.is_some())
            .finish()
    }
}

impl GroupCurve {
    pub fn new<E>(group: &GroupSpec, start: f64, end: f64, order: Order, eval: E) -> Result<Self>
    where
        E: Fn(f64) -> GroupElement + Send + Sync + 'static,
    {
        crate::lcvs::check_interval(start, end)?;
        if !order.allows(1) {
            return Err(Error::OrderExceeded {
                requested: 1,
                declared: 0,
            });
        }
        Ok(Self {
            group: group.clone(),
            start,
            end,
            order,
            eval: Arc::new(eval),
            tangent: None,
        })
    }

    /// Attaches an analytic tangent `t ↦ μ̇(t)` in element coordinates.
    pub fn with_tangent<T>(mut self, tangent: T) -> Self
    where
        T: Fn(f64) -> Vector + Send + Sync + 'static,
    {
        self.tangent = Some(Arc::new(tangent));
        self
    }

    /// `t ↦ exp(tX)`
    pub fn one_parameter(group: &GroupSpec, x: Vector, start: f64, end: f64) -> Result<Self> {
        let (g1, g2) = (group.clone(), group.clone());
        let x2 = x.clone();
        Ok(Self::new(group, start, end, Order::Smooth, move |t| g1.exp(&linalg::scale(&x, t)))?
            .with_tangent(move |t| g2.right_translate(&x2, &g2.exp(&linalg::scale(&x2, t)))))
    }

    /// `t ↦ exp(Z(t))` with tangent from the series for `d exp`.
    pub fn exp_of(group: &GroupSpec, z: &Curve) -> Result<Self> {
        let (g1, g2) = (group.clone(), group.clone());
        let (z1, z2) = (z.clone(), z.clone());
        let order = z.order();
        Ok(Self::new(group, z.start(), z.end(), order, move |t| g1.exp(&z1.eval(t)))?.with_tangent(move |t| {
            let j = z2.raw_jet(t, 1);
            let d = adjoint::dexp_right(&g2, &j[0], &j[1]);
            g2.right_translate(&d, &g2.exp(&j[0]))
        }))
    }

    pub fn constant(group: &GroupSpec, g: GroupElement, start: f64, end: f64) -> Result<Self> {
        let dim = g.coords.len();
        Ok(Self::new(group, start, end, Order::Smooth, move |_| g.clone())?.with_tangent(move |_| linalg::zeros(dim)))
    }

    /// `exp(Z₁(t))·exp(Z₂(t))` for random analytic `Zᵢ` of size `scale`.
    pub fn random<R: Rng + ?Sized>(group: &GroupSpec, rng: &mut R, start: f64, end: f64, scale: f64) -> Result<Self> {
        let d = group.algebra_dim();
        let a = Self::exp_of(group, &crate::random::analytic_curve(rng, d, start, end, scale)?)?;
        let b = Self::exp_of(group, &crate::random::analytic_curve(rng, d, start, end, scale)?)?;
        a.mul(&b)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn is_analytic(&self) -> bool {
        self.tangent.is_some()
    }

    /// Tolerance matching the derivative source.
    pub fn tolerance(&self) -> f64 {
        if self.is_analytic() {
            ANALYTIC_TOLERANCE
        } else {
            FD_TOLERANCE
        }
    }

    pub fn eval(&self, t: f64) -> GroupElement {
        (self.eval)(t)
    }

    /// `μ̇(t)` in element coordinates.
    pub fn velocity(&self, t: f64) -> Vector {
        match &self.tangent {
            Some(f) => f(t),
            None => {
                let h = 1e-4 * (self.end - self.start);
                fd_derivative(|s| self.eval(s).coords, t, h, self.start, self.end)
            }
        }
    }

    /// `Der(μ)(t)`; singular values are reported with their `t`.
    pub fn der_at(&self, t: f64) -> Result<Vector> {
        let g = self.eval(t);
        self.group.try_inv(&g).map_err(|_| Error::Singular { t })?;
        Ok(self.group.right_trivialize(&g, &self.velocity(t)))
    }

    /// `Der(μ)` as an algebra-valued curve of order `k − 1`.
    ///
    /// Singularity is checked on the residual grid; derivatives of the
    /// result come from central differences.
    pub fn der(&self) -> Result<Curve> {
        for t in grid(self.start, self.end, RESIDUAL_GRID) {
            self.der_at(t)?;
        }
        let me = self.clone();
        Curve::from_values_fd(self.start, self.end, self.group.algebra_dim(), self.order.minus(1), move |t| {
            me.der_at(t).unwrap_or_else(|_| alloc::vec![f64::NAN; me.group.algebra_dim()])
        })
    }

    /// Pointwise product `μ·ν`.
    pub fn mul(&self, other: &GroupCurve) -> Result<GroupCurve> {
        let (a, b) = (self.clone(), other.clone());
        let g = self.group.clone();
        let (start, end) = (self.start.max(other.start), self.end.min(other.end));
        let c = Self::new(&self.group, start, end, self.order.min(other.order), move |t| g.mul(&a.eval(t), &b.eval(t)))?;
        Ok(if self.is_analytic() && other.is_analytic() {
            let (a, b) = (self.clone(), other.clone());
            let g = self.group.clone();
            c.with_tangent(move |t| g.tangent_mul(&a.eval(t), &a.velocity(t), &b.eval(t), &b.velocity(t)))
        } else {
            c
        })
    }

    /// Pointwise inverse `μ⁻¹`.
    pub fn inv(&self) -> GroupCurve {
        let a = self.clone();
        let g = self.group.clone();
        let c = Self {
            eval: Arc::new(move |t| g.inv(&a.eval(t))),
            tangent: None,
            ..self.clone()
        };
        if self.is_analytic() {
            let a = self.clone();
            let g = self.group.clone();
            c.with_tangent(move |t| g.tangent_inv(&a.eval(t), &a.velocity(t)))
        } else {
            c
        }
    }

    /// Right translation `μ·g`.
    pub fn mul_const(&self, g: &GroupElement) -> Result<GroupCurve> {
        self.mul(&Self::constant(&self.group, g.clone(), self.start, self.end)?)
    }

    /// `μ ∘ ϱ` for a scalar curve `ϱ` of order ≥ 1.
    pub fn compose(&self, rho: &Curve) -> Result<GroupCurve> {
        if rho.dim() != 1 || !rho.order().allows(1) {
            return Err(Error::InvalidArgument("reparameterization must be scalar and C¹".into()));
        }
        let (a, r) = (self.clone(), rho.clone());
        let c = Self::new(&self.group, rho.start(), rho.end(), self.order.min(rho.order()), move |t| {
            a.eval(r.eval(t)[0])
        })?;
        let (a, r) = (self.clone(), rho.clone());
        // ϱ̇ ≡ 0 on an interval still gives an exact tangent, so the
        // composite is analytic whenever μ is.
        Ok(if self.is_analytic() {
            c.with_tangent(move |t| {
                let j = r.raw_jet(t, 1);
                linalg::scale(&a.velocity(j[0][0]), j[1][0])
            })
        } else {
            c
        })
    }
}

pub(crate) fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

fn sup_residual<F: Fn(f64) -> Result<Vector>>(a: f64, b: f64, f: F) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in grid(a, b, RESIDUAL_GRID) {
        worst = worst.max(linalg::norm(&f(t)?));
    }
    Ok(worst)
}

/// `sup ‖Der(μν) − Der μ − Ad_μ Der ν‖`
pub fn product_rule_residual(mu: &GroupCurve, nu: &GroupCurve) -> Result<f64> {
    let prod = mu.mul(nu)?;
    let g = mu.group();
    sup_residual(prod.start, prod.end, |t| {
        let lhs = prod.der_at(t)?;
        let rhs = linalg::add(&mu.der_at(t)?, &g.ad(&mu.eval(t), &nu.der_at(t)?));
        Ok(linalg::sub(&lhs, &rhs))
    })
}

/// `sup ‖Der(μ⁻¹) + Ad_{μ⁻¹} Der μ‖`
pub fn inverse_rule_residual(mu: &GroupCurve) -> Result<f64> {
    let inv = mu.inv();
    let g = mu.group();
    sup_residual(mu.start, mu.end, |t| {
        let lhs = inv.der_at(t)?;
        let rhs = linalg::scale(&g.ad(&inv.eval(t), &mu.der_at(t)?), -1.0);
        Ok(linalg::sub(&lhs, &rhs))
    })
}

/// `sup ‖Der(μ⁻¹ν) − Ad_{μ⁻¹}(Der ν − Der μ)‖`
pub fn quotient_rule_residual(mu: &GroupCurve, nu: &GroupCurve) -> Result<f64> {
    let q = mu.inv().mul(nu)?;
    let g = mu.group();
    sup_residual(q.start, q.end, |t| {
        let lhs = q.der_at(t)?;
        let diff = linalg::sub(&nu.der_at(t)?, &mu.der_at(t)?);
        let rhs = g.ad(&g.inv(&mu.eval(t)), &diff);
        Ok(linalg::sub(&lhs, &rhs))
    })
}

/// `sup ‖Der(μ∘ϱ) − ϱ̇·Der(μ)∘ϱ‖`
pub fn substitution_rule_residual(mu: &GroupCurve, rho: &Curve) -> Result<f64> {
    let c = mu.compose(rho)?;
    sup_residual(c.start, c.end, |t| {
        let j = rho.jet(t, 1)?;
        let rhs = linalg::scale(&mu.der_at(j[0][0])?, j[1][0]);
        Ok(linalg::sub(&c.der_at(t)?, &rhs))
    })
}

/// `sup_t ‖Der μ(t) − Der ν(t)‖` and the sup chart distance between
/// `μ(t)μ(r)⁻¹` and `ν(t)ν(r)⁻¹`.
pub fn right_translation_gap(mu: &GroupCurve, nu: &GroupCurve) -> Result<(f64, f64)> {
    let g = mu.group();
    let (r, r2) = (mu.start.max(nu.start), mu.end.min(nu.end));
    let (mr, nr) = (g.inv(&mu.eval(r)), g.inv(&nu.eval(r)));
    let mut der_gap: f64 = 0.0;
    let mut dist: f64 = 0.0;
    for t in grid(r, r2, RESIDUAL_GRID) {
        der_gap = der_gap.max(linalg::norm(&linalg::sub(&mu.der_at(t)?, &nu.der_at(t)?)));
        let a = g.mul(&mu.eval(t), &mr);
        let b = g.mul(&nu.eval(t), &nr);
        dist = dist.max(g.chart_distance(&a, &b).value);
    }
    Ok((der_gap, dist))
}

/// Samples of a curve on the residual grid, for reporting.
pub fn sample(mu: &GroupCurve, n: usize) -> Vec<(f64, GroupElement)> {
    grid(mu.start, mu.end, n).map(|t| (t, mu.eval(t))).collect()
}
