//! Product integrals `∮φ` by exponential composition.
//!
//! Stepping is right-product: the new factor multiplies on the left,
//! `μ_{k+1} = exp(h·φ(·))·μ_k`, so that `Der(μ) = μ̇·μ⁻¹` reproduces `φ`.
//! `lie_euler` freezes `φ(t_k)`, `midpoint` uses `φ(t_k + h/2)`. Constant
//! segments are taken in a single exact step and abelian groups integrate
//! each step exactly, `exp(∫φ)`.
//!
//! Every run is repeated at `h/2`; the Richardson estimate
//! `sup_k ‖Ξ(μ_h(t_k)⁻¹·μ_{h/2}(t_k))‖·2ᵖ/(2ᵖ−1)` is reported as the error
//! of the returned (step `h`) solution.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::adjoint;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, Homomorphism};
use crate::lcvs::{Curve, Order, PiecewiseCurve};
use crate::linalg::{self, Vector};
use crate::logderiv::{self, GroupCurve};
use crate::math;
use crate::quadrature::{self, CompositeGauss, SIMPSON_TOLERANCE};

/// Points of the grids on which identity residuals are evaluated.
pub const IDENTITY_GRID: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    LieEuler,
    Midpoint,
}

impl Scheme {
    pub fn order(self) -> usize {
        match self {
            Scheme::LieEuler => 1,
            Scheme::Midpoint => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::LieEuler => "lie_euler",
            Scheme::Midpoint => "midpoint",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lie_euler" => Ok(Scheme::LieEuler),
            "midpoint" => Ok(Scheme::Midpoint),
            other => Err(Error::InvalidArgument(alloc::format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub scheme: Scheme,
    /// Nominal step; each interval is split into `⌈len/h⌉` equal steps.
    pub h: f64,
    pub max_steps: usize,
    /// When set, `h` is halved until the error estimate meets it.
    pub tolerance: Option<f64>,
    /// Run the `h/2` companion for the Richardson estimate.
    pub estimate_error: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Midpoint,
            h: 1.0 / 256.0,
            max_steps: 1 << 24,
            tolerance: None,
            estimate_error: true,
        }
    }
}

impl EvolveConfig {
    pub fn new(scheme: Scheme, h: f64) -> Self {
        Self {
            scheme,
            h,
            ..Self::default()
        }
    }

    pub fn without_estimate(mut self) -> Self {
        self.estimate_error = false;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    /// Steps for an interval of length `len`.
    pub fn step_count(&self, len: f64) -> Result<usize> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!("step must be positive, got {}", self.h)));
        }
        let n = math::ceil(len / self.h - 1e-9).max(1.0);
        if n > self.max_steps as f64 {
            return Err(Error::StepLimit {
                needed: n as usize,
                max: self.max_steps,
            });
        }
        Ok(n as usize)
    }
}

#[derive(Clone, Debug)]
enum StepKind {
    Frozen(Vector),
    Midpoint(Curve),
    Exact(Curve, Arc<StepRule>),
}

#[derive(Clone, Debug)]
struct Step {
    a: f64,
    b: f64,
    base: GroupElement,
    kind: StepKind,
}

/// A computed product integral `μ = ∮ᵣ^• φ` with dense output.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    group: GroupSpec,
    start: f64,
    end: f64,
    pub scheme: Scheme,
    pub h: f64,
    steps: Vec<Step>,
    pub endpoint: GroupElement,
    /// Richardson estimate in the primary (euclidean) seminorm.
    pub error_estimate: f64,
    /// Richardson estimate per algebra seminorm.
    pub error_estimates: Vec<(String, f64)>,
}

fn check_exp_arg(x: &[f64]) -> Result<()> {
    let n = linalg::norm(x);
    if !n.is_finite() || n > 700.0 {
        return Err(Error::ExpOverflow { norm: n });
    }
    Ok(())
}

/// Gauss–Legendre pair used for exact abelian steps.
#[derive(Debug)]
struct StepRule {
    fine: CompositeGauss,
    coarse: CompositeGauss,
}

impl StepRule {
    fn new() -> Arc<Self> {
        Arc::new(Self {
            fine: CompositeGauss::new(1, 16),
            coarse: CompositeGauss::new(1, 8),
        })
    }
}

/// `∫ₐᵇ φ` by 16-point Gauss–Legendre, checked against 8 points; adaptive
/// Simpson when the two disagree.
fn integral(rule: &StepRule, phi: &Curve, a: f64, b: f64) -> Result<Vector> {
    let fine = rule.fine.integrate_vector(|t| phi.eval(t), a, b, phi.dim());
    let coarse = rule.coarse.integrate_vector(|t| phi.eval(t), a, b, phi.dim());
    if linalg::max_abs(&linalg::sub(&fine, &coarse)) <= 1e-14 * (1.0 + linalg::max_abs(&fine)) {
        return Ok(fine);
    }
    quadrature::simpson(|t| phi.eval(t), a, b, phi.dim(), SIMPSON_TOLERANCE)
}

/// Steps of one run over consecutive segments, composed right to left.
fn run(group: &GroupSpec, segments: &[Curve], scheme: Scheme, h: f64, max_steps: usize) -> Result<Vec<Step>> {
    let mut steps = Vec::new();
    let mut mu = group.identity();
    let exact = group.is_abelian();
    let rule = StepRule::new();
    for seg in segments {
        let n = match seg.constant_value() {
            Some(_) => 1,
            None => {
                let n = math::ceil(seg.length() / h - 1e-9).max(1.0);
                if n as usize + steps.len() > max_steps {
                    return Err(Error::StepLimit {
                        needed: n as usize + steps.len(),
                        max: max_steps,
                    });
                }
                n as usize
            }
        };
        let hs = seg.length() / n as f64;
        for k in 0..n {
            let a = seg.start() + k as f64 * hs;
            let b = if k + 1 == n { seg.end() } else { seg.start() + (k + 1) as f64 * hs };
            let (kind, incr) = if let Some(x) = seg.constant_value() {
                (StepKind::Frozen(x.clone()), linalg::scale(x, b - a))
            } else if exact {
                (StepKind::Exact(seg.clone(), rule.clone()), integral(&rule, seg, a, b)?)
            } else {
                match scheme {
                    Scheme::LieEuler => {
                        let x = seg.eval(a);
                        let incr = linalg::scale(&x, b - a);
                        (StepKind::Frozen(x), incr)
                    }
                    Scheme::Midpoint => (StepKind::Midpoint(seg.clone()), linalg::scale(&seg.eval(0.5 * (a + b)), b - a)),
                }
            };
            check_exp_arg(&incr)?;
            let next = group.mul(&group.exp(&incr), &mu);
            steps.push(Step { a, b, base: mu, kind });
            mu = next;
        }
    }
    Ok(steps)
}

impl Step {
    fn increment(&self, t: f64) -> Vector {
        let s = t - self.a;
        match &self.kind {
            StepKind::Frozen(x) => linalg::scale(x, s),
            StepKind::Midpoint(phi) => linalg::scale(&phi.eval(self.a + 0.5 * s), s),
            StepKind::Exact(phi, rule) => integral(rule, phi, self.a, t).unwrap_or_else(|_| alloc::vec![f64::NAN; phi.dim()]),
        }
    }

    fn der(&self, group: &GroupSpec, t: f64) -> Vector {
        let s = t - self.a;
        match &self.kind {
            StepKind::Frozen(x) => x.clone(),
            StepKind::Exact(phi, _) => phi.eval(t),
            StepKind::Midpoint(phi) => {
                let m = self.a + 0.5 * s;
                let z = linalg::scale(&phi.eval(m), s);
                let mut dz = phi.eval(m);
                linalg::axpy(&mut dz, 0.5 * s, &phi.velocity(m));
                adjoint::dexp_right(group, &z, &dz)
            }
        }
    }
}

fn endpoint_of(group: &GroupSpec, steps: &[Step]) -> GroupElement {
    let last = &steps[steps.len() - 1];
    group.mul(&group.exp(&last.increment(last.b)), &last.base)
}

impl EvolutionResult {
    fn assemble(group: &GroupSpec, segments: &[Curve], cfg: &EvolveConfig) -> Result<Self> {
        let mut h = cfg.h;
        loop {
            let mut res = Self::single(group, segments, cfg, h)?;
            match cfg.tolerance {
                Some(tol) if res.error_estimate > tol => {
                    h *= 0.5;
                    let total: f64 = segments.iter().map(|s| s.length()).sum();
                    if total / h > cfg.max_steps as f64 {
                        return Err(Error::StepLimit {
                            needed: math::ceil(total / h) as usize,
                            max: cfg.max_steps,
                        });
                    }
                }
                _ => {
                    res.h = h;
                    return Ok(res);
                }
            }
        }
    }

    fn single(group: &GroupSpec, segments: &[Curve], cfg: &EvolveConfig, h: f64) -> Result<Self> {
        let estimate = cfg.estimate_error || cfg.tolerance.is_some();
        let steps = run(group, segments, cfg.scheme, h, cfg.max_steps)?;
        let endpoint = endpoint_of(group, &steps);
        let mut res = Self {
            group: group.clone(),
            start: segments[0].start(),
            end: segments[segments.len() - 1].end(),
            scheme: cfg.scheme,
            h,
            steps,
            endpoint,
            error_estimate: 0.0,
            error_estimates: group.algebra().seminorms().iter().map(|(n, _)| (n.clone(), 0.0)).collect(),
        };
        if estimate {
            let fine = run(group, segments, cfg.scheme, 0.5 * h, cfg.max_steps.saturating_mul(2))?;
            let fine_end = endpoint_of(group, &fine);
            let p = math::powi(2.0, cfg.scheme.order() as i32);
            let factor = p / (p - 1.0);
            let mut pairs: Vec<(GroupElement, GroupElement)> = Vec::new();
            let mut j = 0;
            for st in &res.steps {
                while j < fine.len() && fine[j].a < st.a {
                    j += 1;
                }
                if j < fine.len() && fine[j].a == st.a {
                    pairs.push((st.base.clone(), fine[j].base.clone()));
                }
            }
            pairs.push((res.endpoint.clone(), fine_end));
            for (k, (_, s)) in group.algebra().seminorms().iter().enumerate() {
                let mut worst: f64 = 0.0;
                for (a, b) in &pairs {
                    let q = group.quotient(a, b);
                    let d = match group.chart(&q) {
                        Ok(x) => s.eval(&x),
                        Err(_) => linalg::max_abs(&linalg::sub(&a.coords, &b.coords)),
                    };
                    worst = worst.max(d);
                }
                res.error_estimates[k].1 = worst * factor;
            }
            res.error_estimate = res.error_estimates[0].1;
        }
        Ok(res)
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

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Step boundaries `t₀ < t₁ < … < t_N`.
    pub fn nodes(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.steps.iter().map(|s| s.a).collect();
        v.push(self.end);
        v
    }

    fn step_index(&self, t: f64) -> usize {
        let idx = self.steps.partition_point(|s| s.a <= t);
        idx.saturating_sub(1).min(self.steps.len() - 1)
    }

    /// `∮ᵣᵗ φ` (dense output inside a step).
    pub fn value_at(&self, t: f64) -> GroupElement {
        if t == self.end {
            return self.endpoint.clone();
        }
        let st = &self.steps[self.step_index(t)];
        if t == st.a {
            return st.base.clone();
        }
        self.group.mul(&self.group.exp(&st.increment(t)), &st.base)
    }

    /// `Der(μ)(t)` of the dense output.
    pub fn der_at(&self, t: f64) -> Vector {
        self.steps[self.step_index(t)].der(&self.group, t)
    }

    /// The dense output as a group curve with analytic tangent.
    pub fn curve(&self) -> Result<GroupCurve> {
        let (a, b) = (self.clone(), self.clone());
        Ok(
            GroupCurve::new(&self.group, self.start, self.end, Order::Finite(1), move |t| a.value_at(t))?
                .with_tangent(move |t| b.group.right_translate(&b.der_at(t), &b.value_at(t))),
        )
    }
}

/// `∮φ` over the interval of `φ`.
pub fn evolve(group: &GroupSpec, phi: &Curve, cfg: &EvolveConfig) -> Result<EvolutionResult> {
    check_dim(group, phi)?;
    cfg.step_count(phi.length())?;
    EvolutionResult::assemble(group, core::slice::from_ref(phi), cfg)
}

/// Segment-wise evolution `∮_{t_p}^t · ∮_{t_{p−1}}^{t_p} ⋯ ∮_{t₀}^{t₁}`.
pub fn evolve_piecewise(group: &GroupSpec, pw: &PiecewiseCurve, cfg: &EvolveConfig) -> Result<EvolutionResult> {
    for s in pw.segments() {
        check_dim(group, s)?;
    }
    cfg.step_count(pw.end() - pw.start())?;
    EvolutionResult::assemble(group, pw.segments(), cfg)
}

fn check_dim(group: &GroupSpec, phi: &Curve) -> Result<()> {
    if phi.dim() != group.algebra_dim() {
        return Err(Error::DimensionMismatch {
            expected: group.algebra_dim(),
            found: phi.dim(),
        });
    }
    Ok(())
}

/// `sup_t ‖Der(∮•φ)(t) − φ(t)‖` on the dense output.
pub fn reconstruct_residual(group: &GroupSpec, phi: &Curve, cfg: &EvolveConfig) -> Result<f64> {
    let evo = evolve(group, phi, cfg)?;
    let mut worst: f64 = 0.0;
    for t in logderiv::grid(phi.start(), phi.end(), 257) {
        worst = worst.max(linalg::norm(&linalg::sub(&evo.der_at(t), &phi.eval(t))));
    }
    Ok(worst)
}

/// A residual with the error estimates it should be judged against.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub residual: f64,
    /// Sum of the Richardson estimates of every evolution involved.
    pub estimate: f64,
    /// False when some comparison fell back to raw coordinates.
    pub in_chart: bool,
}

impl ResidualReport {
    /// `residual ≤ max(factor·estimate, floor)`
    pub fn within(&self, factor: f64, floor: f64) -> bool {
        self.residual <= (factor * self.estimate).max(floor)
    }
}

fn sup_distance<F>(group: &GroupSpec, a: f64, b: f64, n: usize, pair: F) -> (f64, bool)
where
    F: Fn(f64) -> (GroupElement, GroupElement),
{
    let mut worst: f64 = 0.0;
    let mut in_chart = true;
    for t in logderiv::grid(a, b, n) {
        let (x, y) = pair(t);
        let d = group.chart_distance(&x, &y);
        in_chart &= d.in_chart;
        worst = worst.max(d.value);
    }
    (worst, in_chart)
}

/// `φ̌(t) = −φ(r + r' − t)`
pub fn reverse(phi: &Curve) -> Curve {
    phi.reflect().scale(-1.0)
}

/// Chart distance of `∮φ̌·∮φ` from `e`.
pub fn reverse_residual(group: &GroupSpec, phi: &Curve, cfg: &EvolveConfig) -> Result<ResidualReport> {
    let fwd = evolve(group, phi, cfg)?;
    let bwd = evolve(group, &reverse(phi), cfg)?;
    let d = group.chart_distance(&group.identity(), &group.mul(&bwd.endpoint, &fwd.endpoint));
    Ok(ResidualReport {
        residual: d.value,
        estimate: fwd.error_estimate + bwd.error_estimate,
        in_chart: d.in_chart,
    })
}

/// Chart distance between `∮φ` and the product of the segment integrals
/// over the given interior breakpoints.
pub fn concat_residual(group: &GroupSpec, phi: &Curve, breakpoints: &[f64]) -> Result<ResidualReport> {
    concat_residual_with(group, phi, breakpoints, &EvolveConfig::default())
}

pub fn concat_residual_with(group: &GroupSpec, phi: &Curve, breakpoints: &[f64], cfg: &EvolveConfig) -> Result<ResidualReport> {
    let mut cuts = alloc::vec![phi.start()];
    cuts.extend(breakpoints.iter().copied().filter(|&t| t > phi.start() && t < phi.end()));
    cuts.push(phi.end());
    let pw = PiecewiseCurve::from_fn(cuts, |_, a, b| phi.restrict(a, b))?;
    let whole = evolve(group, phi, cfg)?;
    let parts = evolve_piecewise(group, &pw, cfg)?;
    let d = group.chart_distance(&whole.endpoint, &parts.endpoint);
    Ok(ResidualReport {
        residual: d.value,
        estimate: whole.error_estimate + parts.error_estimate,
        in_chart: d.in_chart,
    })
}

/// Sup distance between `∮_{ϱ(r)}^{ϱ(t)} φ` and `∮ᵣᵗ ϱ̇·φ∘ϱ` for a monotone
/// `ϱ` mapping its interval onto that of `φ`.
pub fn substitution_check(group: &GroupSpec, phi: &Curve, rho: &Curve, cfg: &EvolveConfig) -> Result<ResidualReport> {
    let (lo, hi) = (rho.eval(rho.start())[0], rho.eval(rho.end())[0]);
    if (lo - phi.start()).abs() > 1e-12 || (hi - phi.end()).abs() > 1e-12 {
        return Err(Error::InvalidArgument("reparameterization must map onto the curve interval".into()));
    }
    let sub = phi.substitute(rho)?;
    let direct = evolve(group, phi, cfg)?;
    let moved = evolve(group, &sub, cfg)?;
    let (res, in_chart) = sup_distance(group, rho.start(), rho.end(), IDENTITY_GRID, |t| {
        (direct.value_at(rho.eval(t)[0].clamp(phi.start(), phi.end())), moved.value_at(t))
    });
    Ok(ResidualReport {
        residual: res,
        estimate: direct.error_estimate + moved.error_estimate,
        in_chart,
    })
}

fn transported<F>(group: &GroupSpec, base: &EvolutionResult, dim: usize, f: F) -> Result<Curve>
where
    F: Fn(&GroupSpec, &GroupElement, f64) -> Vector + Send + Sync + 'static,
{
    let (g, b) = (group.clone(), base.clone());
    Curve::new(base.start(), base.end(), dim, Order::Finite(0), move |t, _| {
        alloc::vec![f(&g, &b.value_at(t), t)]
    })
}

/// Rule a): `∮ᵗφ·∮ᵗψ` vs `∮ᵗ(φ + Ad_{∮•φ}ψ)`.
pub fn product_identity_residual(group: &GroupSpec, phi: &Curve, psi: &Curve, cfg: &EvolveConfig) -> Result<ResidualReport> {
    let ep = evolve(group, phi, cfg)?;
    let es = evolve(group, psi, cfg)?;
    let (p, s) = (phi.clone(), psi.clone());
    let chi = transported(group, &ep, phi.dim(), move |g, mu, t| linalg::add(&p.eval(t), &g.ad(mu, &s.eval(t))))?;
    let ec = evolve(group, &chi, cfg)?;
    let (res, in_chart) = sup_distance(group, phi.start(), phi.end(), IDENTITY_GRID, |t| {
        (group.mul(&ep.value_at(t), &es.value_at(t)), ec.value_at(t))
    });
    Ok(ResidualReport {
        residual: res,
        estimate: ep.error_estimate + es.error_estimate + ec.error_estimate,
        in_chart,
    })
}

/// Rule b): `[∮ᵗφ]⁻¹∮ᵗψ` vs `∮ᵗ Ad_{[∮•φ]⁻¹}(ψ − φ)`.
pub fn quotient_identity_residual(group: &GroupSpec, phi: &Curve, psi: &Curve, cfg: &EvolveConfig) -> Result<ResidualReport> {
    let ep = evolve(group, phi, cfg)?;
    let es = evolve(group, psi, cfg)?;
    let (p, s) = (phi.clone(), psi.clone());
    let chi = transported(group, &ep, phi.dim(), move |g, mu, t| g.ad(&g.inv(mu), &linalg::sub(&s.eval(t), &p.eval(t))))?;
    let ec = evolve(group, &chi, cfg)?;
    let (res, in_chart) = sup_distance(group, phi.start(), phi.end(), IDENTITY_GRID, |t| {
        (group.quotient(&ep.value_at(t), &es.value_at(t)), ec.value_at(t))
    });
    Ok(ResidualReport {
        residual: res,
        estimate: ep.error_estimate + es.error_estimate + ec.error_estimate,
        in_chart,
    })
}

/// Rule c): `[∮ᵗφ]⁻¹` vs `∮ᵗ −Ad_{[∮•φ]⁻¹}φ`.
pub fn inverse_identity_residual(group: &GroupSpec, phi: &Curve, cfg: &EvolveConfig) -> Result<ResidualReport> {
    let ep = evolve(group, phi, cfg)?;
    let p = phi.clone();
    let chi = transported(group, &ep, phi.dim(), move |g, mu, t| linalg::scale(&g.ad(&g.inv(mu), &p.eval(t)), -1.0))?;
    let ec = evolve(group, &chi, cfg)?;
    let (res, in_chart) = sup_distance(group, phi.start(), phi.end(), IDENTITY_GRID, |t| {
        (group.inv(&ep.value_at(t)), ec.value_at(t))
    });
    Ok(ResidualReport {
        residual: res,
        estimate: ep.error_estimate + ec.error_estimate,
        in_chart,
    })
}

/// Rule f): `Ψ(∮ᵗφ)` vs `∮ᵗ dΨ∘φ` in the target group.
pub fn hom_transport_residual(hom: &Homomorphism, phi: &Curve, cfg: &EvolveConfig) -> Result<ResidualReport> {
    let (src, dst) = (hom.source(), hom.target());
    let e_src = evolve(&src, phi, cfg)?;
    let h = hom.clone();
    let pushed = phi.map_linear(dst.algebra_dim(), move |v| h.differential(v));
    let e_dst = evolve(&dst, &pushed, cfg)?;
    let (res, in_chart) = sup_distance(&dst, phi.start(), phi.end(), IDENTITY_GRID, |t| {
        (hom.apply(&e_src.value_at(t)), e_dst.value_at(t))
    });
    Ok(ResidualReport {
        residual: res,
        estimate: e_src.error_estimate + e_dst.error_estimate,
        in_chart,
    })
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub error: f64,
    /// `log₂(error(2h)/error(h))`, absent for the first row.
    pub local_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub scheme: Scheme,
    pub oracle_h: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log₂ error` against `log₂ h`.
    pub order: f64,
}

/// Endpoint errors for each step in `hs` against a midpoint run at `oracle_h`.
pub fn convergence_study(group: &GroupSpec, phi: &Curve, scheme: Scheme, hs: &[f64], oracle_h: f64) -> Result<ConvergenceTable> {
    let oracle = evolve(group, phi, &EvolveConfig::new(Scheme::Midpoint, oracle_h).without_estimate())?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(hs.len());
    for &h in hs {
        let r = evolve(group, phi, &EvolveConfig::new(scheme, h).without_estimate())?;
        let error = group.chart_distance(&oracle.endpoint, &r.endpoint).value;
        let local_order = rows.last().map(|p: &ConvergenceRow| math::log2(p.error / error) / math::log2(p.h / h));
        rows.push(ConvergenceRow { h, error, local_order });
    }
    let xs: Vec<f64> = rows.iter().map(|r| math::log2(r.h)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| math::log2(r.error)).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ConvergenceTable {
        scheme,
        oracle_h,
        rows,
        order: sxy / sxx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use crate::lcvs::FourierTerm;
    use alloc::vec;

    fn so3_curve() -> Curve {
        Curve::fourier(
            0.0,
            1.0,
            vec![],
            vec![FourierTerm {
                frequency: 1.0,
                cos: vec![1.0, 0.0, 0.0],
                sin: vec![0.0, 0.0, 1.0],
            }],
        )
        .unwrap()
    }

    #[test]
    fn constant_curve_is_exact() {
        let g = GroupSpec::so3();
        let x = vec![0.4, -0.3, 1.1];
        let phi = Curve::constant(0.0, 1.0, x.clone()).unwrap();
        for scheme in [Scheme::LieEuler, Scheme::Midpoint] {
            let r = evolve(&g, &phi, &EvolveConfig::new(scheme, 0.1)).unwrap();
            assert!(linalg::max_abs(&linalg::sub(&r.endpoint.coords, &g.exp(&x).coords)) < 1e-15);
            assert_eq!(r.error_estimate, 0.0);
        }
    }

    #[test]
    fn piecewise_constant_is_a_product_of_exponentials() {
        let g = GroupSpec::su2();
        let (x1, x2) = (vec![0.3, 0.1, -0.7], vec![-1.0, 0.4, 0.2]);
        let pw = PiecewiseCurve::piecewise_constant(vec![0.0, 0.5, 1.0], vec![x1.clone(), x2.clone()]).unwrap();
        let r = evolve_piecewise(&g, &pw, &EvolveConfig::default()).unwrap();
        let expect = g.mul(&g.exp(&linalg::scale(&x2, 0.5)), &g.exp(&linalg::scale(&x1, 0.5)));
        assert!(linalg::max_abs(&linalg::sub(&r.endpoint.coords, &expect.coords)) < 1e-15);
    }

    #[test]
    fn midpoint_matches_fine_lie_euler() {
        let g = GroupSpec::so3();
        let phi = so3_curve();
        let mid = evolve(&g, &phi, &EvolveConfig::new(Scheme::Midpoint, 1e-3)).unwrap();
        let fine = evolve(&g, &phi, &EvolveConfig::new(Scheme::Midpoint, 1e-5).without_estimate()).unwrap();
        assert!(g.chart_distance(&mid.endpoint, &fine.endpoint).value < 1e-7);
        assert!(mid.error_estimate < 1e-6);
    }

    #[test]
    fn abelian_is_closed_form() {
        let g = make_group("abelian(2)").unwrap();
        let phi = so3_curve().map_linear(2, |v| vec![v[0], v[2]]);
        let r = evolve(&g, &phi, &EvolveConfig::new(Scheme::LieEuler, 0.25)).unwrap();
        let exact = [math::sin(1.0), 1.0 - math::cos(1.0)];
        assert!(linalg::max_abs(&linalg::sub(&r.endpoint.coords, &exact)) < 1e-12);
    }

    #[test]
    fn dense_output_reconstructs_phi() {
        let g = GroupSpec::so3();
        let phi = so3_curve();
        let e1 = reconstruct_residual(&g, &phi, &EvolveConfig::new(Scheme::Midpoint, 1.0 / 32.0)).unwrap();
        let e2 = reconstruct_residual(&g, &phi, &EvolveConfig::new(Scheme::Midpoint, 1.0 / 64.0)).unwrap();
        let order = math::log2(e1 / e2);
        assert!((order - 2.0).abs() < 0.2, "{order}");
    }

    #[test]
    fn orders_of_both_schemes() {
        let g = GroupSpec::so3();
        let phi = so3_curve();
        let hs: Vec<f64> = (4..=8).map(|k| math::powi(2.0, -k)).collect();
        let le = convergence_study(&g, &phi, Scheme::LieEuler, &hs, 1.0 / 4096.0).unwrap();
        let mp = convergence_study(&g, &phi, Scheme::Midpoint, &hs, 1.0 / 4096.0).unwrap();
        assert!((le.order - 1.0).abs() < 0.2, "{}", le.order);
        assert!((mp.order - 2.0).abs() < 0.2, "{}", mp.order);
    }

    #[test]
    fn identities_on_so3() {
        let g = GroupSpec::so3();
        let phi = so3_curve();
        let psi = phi.reflect().scale(0.7);
        let cfg = EvolveConfig::new(Scheme::Midpoint, 1.0 / 64.0);
        let a = product_identity_residual(&g, &phi, &psi, &cfg).unwrap();
        let b = quotient_identity_residual(&g, &phi, &psi, &cfg).unwrap();
        let c = inverse_identity_residual(&g, &phi, &cfg).unwrap();
        let r = reverse_residual(&g, &phi, &cfg).unwrap();
        for rep in [a, b, c, r] {
            assert!(rep.within(5.0, 1e-12), "{rep:?}");
        }
        let same = quotient_identity_residual(&g, &phi, &phi, &cfg).unwrap();
        assert!(same.residual < 1e-12);
    }
}
