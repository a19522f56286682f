//! Derivatives of product integrals.
//!
//! Left-trivialized derivatives are compared with their integral formulas:
//! `d/dh|₀ Ξ(∮hφ) = ∫φ`, the parameter rule
//! `∂ₓ∮Φ(x,·) = dL_{∮Φ(x,·)}(∫ Ad_{[∮ʳ˒ˢΦ(x,·)]⁻¹}(∂ₓΦ(x,s)) ds)`, and
//! Duhamel's formula for `∂ₓ exp(X(x))`.
//!
//! Formulas transport along the evolution with classical RK4 on
//! `Ṁ = −M·ad_{φ(s)}`, `η̇ = M·∂ₓΦ(s)`, where `M(s) = Ad_{μ(s)⁻¹}`. Numeric
//! sides use Richardson-extrapolated central differences of
//! `Ξ(g(x)⁻¹·g(x+h))` on endpoints computed by Romberg-extrapolated midpoint
//! runs.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolution::{self, EvolveConfig, Scheme};
use crate::group::{GroupElement, GroupSpec};
use crate::lcvs::{self, Curve, Order};
use crate::linalg::{self, Mat, Vector};
use crate::math;
use crate::quadrature::CompositeGauss;
use crate::{adjoint, logderiv};

/// Central-difference steps, halved twice for Richardson.
pub const FD_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Steps of the plain central differences used to measure the FD slope.
pub const SLOPE_STEPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Clone, Debug, PartialEq)]
pub struct CalculusConfig {
    /// Midpoint steps of the coarsest run of a precise endpoint.
    pub steps: usize,
    /// RK4 steps of the coarse transport run.
    pub transport_steps: usize,
    pub fd_steps: [f64; 3],
}

impl Default for CalculusConfig {
    fn default() -> Self {
        Self {
            steps: 256,
            transport_steps: 256,
            fd_steps: FD_STEPS,
        }
    }
}

type ParamFn = dyn Fn(f64, f64) -> Vector + Send + Sync;

/// Declared bound `|h|⁻¹·p^s_∞(Φ(x+h,·) − Φ(x,·)) ≤ L`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzBound {
    pub seminorm: String,
    pub order: usize,
    pub bound: f64,
}

/// A parameter-dependent family `Φ(x, t)` of algebra curves on `[r, r']`.
#[derive(Clone)]
pub struct ParamFamily {
    start: f64,
    end: f64,
    dim: usize,
    eval: Arc<ParamFn>,
    partial: Option<Arc<ParamFn>>,
    lipschitz: Vec<LipschitzBound>,
}

impl core::fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ParamFamily")
            .field("start", &self.start)
            .field("end", &self.end)
            .field("dim", &self.dim)
            .field("partial", &self.partial.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ParamFamily {
    pub fn new<F>(start: f64, end: f64, dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vector + Send + Sync + 'static,
    {
        lcvs::check_interval(start, end)?;
        Ok(Self {
            start,
            end,
            dim,
            eval: Arc::new(eval),
            partial: None,
            lipschitz: Vec::new(),
        })
    }

    /// `Φ(x, t) = φ(t) + x·ψ(t)`
    pub fn affine(phi: &Curve, psi: &Curve) -> Result<Self> {
        if phi.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                found: psi.dim(),
            });
        }
        let (p, q, q2) = (phi.clone(), psi.clone(), psi.clone());
        Ok(Self::new(phi.start(), phi.end(), phi.dim(), move |x, t| {
            let mut v = p.eval(t);
            linalg::axpy(&mut v, x, &q.eval(t));
            v
        })?
        .with_partial(move |_, t| q2.eval(t)))
    }

    pub fn with_partial<F>(mut self, partial: F) -> Self
    where
        F: Fn(f64, f64) -> Vector + Send + Sync + 'static,
    {
        self.partial = Some(Arc::new(partial));
        self
    }

    pub fn with_lipschitz(mut self, seminorm: &str, order: usize, bound: f64) -> Self {
        self.lipschitz.push(LipschitzBound {
            seminorm: seminorm.into(),
            order,
            bound,
        });
        self
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: f64, t: f64) -> Vector {
        (self.eval)(x, t)
    }

    pub fn partial(&self, x: f64, t: f64) -> Option<Vector> {
        self.partial.as_ref().map(|p| p(x, t))
    }

    pub fn lipschitz(&self) -> &[LipschitzBound] {
        &self.lipschitz
    }

    /// `Φ(x, ·)` with finite-difference derivatives.
    pub fn curve_at(&self, x: f64) -> Result<Curve> {
        let f = self.eval.clone();
        Curve::from_values_fd(self.start, self.end, self.dim, Order::Finite(2), move |t| f(x, t))
    }

    /// Sup over a grid of `|∂ₓΦ − central difference in x|` at step `h`.
    pub fn partial_consistency(&self, x: f64, h: f64) -> Result<f64> {
        let partial = self.partial.as_ref().ok_or_else(|| Error::InvalidArgument("no declared partial derivative".into()))?;
        let mut worst: f64 = 0.0;
        for t in logderiv::grid(self.start, self.end, 65) {
            let fd = linalg::scale(&linalg::sub(&self.eval(x + h, t), &self.eval(x - h, t)), 0.5 / h);
            worst = worst.max(linalg::max_abs(&linalg::sub(&fd, &partial(x, t))));
        }
        Ok(worst)
    }

    /// Samples the declared difference-quotient bounds at `x` on a log grid
    /// of steps. Rejects the first violated `(seminorm, order, h)`.
    pub fn check_hypotheses(&self, group: &GroupSpec, x: f64) -> Result<()> {
        if self.partial.is_none() {
            return Err(Error::InvalidArgument("no declared partial derivative".into()));
        }
        for lb in &self.lipschitz {
            let p = group
                .algebra()
                .get(&lb.seminorm)
                .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown seminorm `{}`", lb.seminorm)))?
                .clone();
            for h in [1e-1, -3e-2, 1e-2, -3e-3, 1e-3] {
                let f = self.eval.clone();
                let diff = Curve::from_values_fd(self.start, self.end, self.dim, Order::Finite(lb.order), move |t| {
                    linalg::sub(&f(x + h, t), &f(x, t))
                })?;
                let value = lcvs::ck_seminorm(&diff, &p, lb.order, 257)?.value / h.abs();
                if value > lb.bound {
                    return Err(Error::HypothesisViolation {
                        seminorm: lb.seminorm.clone(),
                        order: lb.order,
                        h,
                        value,
                        bound: lb.bound,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Endpoint of `∮φ` from midpoint runs with `n`, `2n` and `4n` steps,
/// Romberg-extrapolated in chart coordinates around the finest run. Abelian
/// evolutions are exact and use a single run.
pub fn precise_endpoint(group: &GroupSpec, phi: &Curve, n: usize) -> Result<GroupElement> {
    let run = |k: usize| -> Result<GroupElement> {
        let cfg = EvolveConfig::new(Scheme::Midpoint, phi.length() / k as f64).without_estimate();
        Ok(evolution::evolve(group, phi, &cfg)?.endpoint)
    };
    if group.is_abelian() {
        return run(n);
    }
    let (e1, e2, e4) = (run(n)?, run(2 * n)?, run(4 * n)?);
    let c1 = group.chart(&group.quotient(&e4, &e1))?;
    let c2 = group.chart(&group.quotient(&e4, &e2))?;
    let r_a = linalg::scale(&linalg::sub(&linalg::scale(&c2, 4.0), &c1), 1.0 / 3.0);
    let r_b = linalg::scale(&c2, -1.0 / 3.0);
    let r = linalg::scale(&linalg::sub(&linalg::scale(&r_b, 16.0), &r_a), 1.0 / 15.0);
    Ok(group.mul(&e4, &group.unchart(&r)?))
}

fn rk4_transport<P, S>(group: &GroupSpec, phi: &P, src: &S, a: f64, b: f64, n: usize) -> Vector
where
    P: Fn(f64) -> Vector,
    S: Fn(f64) -> Vector,
{
    let d = group.algebra_dim();
    let h = (b - a) / n as f64;
    let mut m = Mat::identity(d);
    let mut eta = linalg::zeros(d);
    let rhs = |t: f64, m: &Mat| -> (Mat, Vector) { (m.mul(&group.ad_matrix(&phi(t))).scale(-1.0), m.mul_vec(&src(t))) };
    for k in 0..n {
        let t = a + k as f64 * h;
        let (k1m, k1e) = rhs(t, &m);
        let (k2m, k2e) = rhs(t + 0.5 * h, &m.add(&k1m.scale(0.5 * h)));
        let (k3m, k3e) = rhs(t + 0.5 * h, &m.add(&k2m.scale(0.5 * h)));
        let (k4m, k4e) = rhs(t + h, &m.add(&k3m.scale(h)));
        m = m.add(&k1m.add(&k2m.scale(2.0)).add(&k3m.scale(2.0)).add(&k4m).scale(h / 6.0));
        for i in 0..d {
            eta[i] += h / 6.0 * (k1e[i] + 2.0 * k2e[i] + 2.0 * k3e[i] + k4e[i]);
        }
    }
    eta
}

/// `∫ᵣʳ' Ad_{[∮ʳ˒ˢφ]⁻¹}(src(s)) ds`, Richardson-extrapolated over `n` and `2n` RK4 steps.
pub fn transport_integral<P, S>(group: &GroupSpec, phi: P, src: S, a: f64, b: f64, n: usize) -> Vector
where
    P: Fn(f64) -> Vector,
    S: Fn(f64) -> Vector,
{
    let coarse = rk4_transport(group, &phi, &src, a, b, n);
    let fine = rk4_transport(group, &phi, &src, a, b, 2 * n);
    linalg::scale(&linalg::sub(&linalg::scale(&fine, 16.0), &coarse), 1.0 / 15.0)
}

/// Numeric side, integral formula and their distance.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeCheck {
    pub numeric: Vector,
    pub formula: Vector,
    /// Primary-seminorm distance.
    pub gap: f64,
    /// Distance per algebra seminorm.
    pub gaps: Vec<(String, f64)>,
}

impl DerivativeCheck {
    fn new(group: &GroupSpec, numeric: Vector, formula: Vector) -> Self {
        let diff = linalg::sub(&numeric, &formula);
        let gaps: Vec<(String, f64)> = group.algebra().seminorms().iter().map(|(n, s)| (n.clone(), s.eval(&diff))).collect();
        Self {
            gap: gaps[0].1,
            gaps,
            numeric,
            formula,
        }
    }

    /// `gap / ‖formula‖`, or the plain gap when the formula vanishes.
    pub fn relative_gap(&self) -> f64 {
        relative(self.gap, linalg::norm(&self.formula))
    }
}

fn relative(gap: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        gap / scale
    } else {
        gap
    }
}

/// Value at zero of the interpolating polynomial through `(hᵢ, vᵢ)`.
fn neville_at_zero(hs: &[f64], vals: &[Vector]) -> Vector {
    let mut p: Vec<Vector> = vals.to_vec();
    let n = hs.len();
    for k in 1..n {
        for i in 0..n - k {
            let (hi, hk) = (hs[i], hs[i + k]);
            p[i] = linalg::scale(&linalg::sub(&linalg::scale(&p[i + 1], hi), &linalg::scale(&p[i], hk)), 1.0 / (hi - hk));
        }
    }
    p.swap_remove(0)
}

/// `d/dh|₀ Ξ(∮hφ)` by polynomial extrapolation of `Ξ(∮hφ)/h` over
/// `h = 2⁻³, …, 2⁻¹⁰`, against `∫φ`.
pub fn directional_derivative_at_zero(group: &GroupSpec, phi: &Curve, cfg: &CalculusConfig) -> Result<DerivativeCheck> {
    let hs: Vec<f64> = (3..=10).map(|k| math::powi(2.0, -k)).collect();
    let mut vals = Vec::with_capacity(hs.len());
    for &h in &hs {
        let end = precise_endpoint(group, &phi.scale(h), cfg.steps)?;
        vals.push(linalg::scale(&group.chart(&end)?, 1.0 / h));
    }
    let numeric = neville_at_zero(&hs, &vals);
    let formula = lcvs::riemann_integral(phi, phi.start(), phi.end())?;
    Ok(DerivativeCheck::new(group, numeric, formula))
}

/// Richardson-extrapolated central difference of `Ξ(g(0)⁻¹·g(h))`.
fn chart_derivative<G>(group: &GroupSpec, steps: &[f64; 3], g: G) -> Result<Vector>
where
    G: Fn(f64) -> Result<GroupElement>,
{
    let base = g(0.0)?;
    let mut d = Vec::with_capacity(3);
    for &h in steps {
        let plus = group.chart(&group.quotient(&base, &g(h)?))?;
        let minus = group.chart(&group.quotient(&base, &g(-h)?))?;
        d.push(linalg::scale(&linalg::sub(&plus, &minus), 0.5 / h));
    }
    let r = steps[0] / steps[1];
    let f1 = r * r;
    let a = linalg::scale(&linalg::sub(&linalg::scale(&d[1], f1), &d[0]), 1.0 / (f1 - 1.0));
    let b = linalg::scale(&linalg::sub(&linalg::scale(&d[2], f1), &d[1]), 1.0 / (f1 - 1.0));
    let f2 = f1 * f1;
    Ok(linalg::scale(&linalg::sub(&linalg::scale(&b, f2), &a), 1.0 / (f2 - 1.0)))
}

/// Integral formula `∫ Ad_{[∮ʳ˒ˢΦ(x,·)]⁻¹}(∂ₓΦ(x,s)) ds` for the left-trivialized
/// derivative of `x ↦ ∮Φ(x,·)`.
pub fn param_formula(group: &GroupSpec, fam: &ParamFamily, x: f64, cfg: &CalculusConfig) -> Result<Vector> {
    let partial = fam.partial.clone().ok_or_else(|| Error::InvalidArgument("no declared partial derivative".into()))?;
    let f = fam.eval.clone();
    Ok(transport_integral(group, |t| f(x, t), |t| partial(x, t), fam.start, fam.end, cfg.transport_steps))
}

/// Left-trivialized `∂ₓ∮Φ(x,·)`: numeric side against the integral formula.
pub fn param_derivative(group: &GroupSpec, fam: &ParamFamily, x: f64, cfg: &CalculusConfig) -> Result<DerivativeCheck> {
    fam.check_hypotheses(group, x)?;
    let formula = param_formula(group, fam, x, cfg)?;
    let numeric = chart_derivative(group, &cfg.fd_steps, |h| precise_endpoint(group, &fam.curve_at(x + h)?, cfg.steps))?;
    Ok(DerivativeCheck::new(group, numeric, formula))
}

/// Gaps of plain central differences at `steps` against the formula, with
/// the least-squares slope of `log₂ gap` against `log₂ h`.
pub fn param_gap_slope(group: &GroupSpec, fam: &ParamFamily, x: f64, steps: &[f64], cfg: &CalculusConfig) -> Result<(Vec<f64>, f64)> {
    let formula = param_formula(group, fam, x, cfg)?;
    let base = precise_endpoint(group, &fam.curve_at(x)?, cfg.steps)?;
    let mut gaps = Vec::with_capacity(steps.len());
    for &h in steps {
        let plus = group.chart(&group.quotient(&base, &precise_endpoint(group, &fam.curve_at(x + h)?, cfg.steps)?))?;
        let minus = group.chart(&group.quotient(&base, &precise_endpoint(group, &fam.curve_at(x - h)?, cfg.steps)?))?;
        let fd = linalg::scale(&linalg::sub(&plus, &minus), 0.5 / h);
        gaps.push(linalg::norm(&linalg::sub(&fd, &formula)));
    }
    Ok((gaps.clone(), log_slope(steps, &gaps)))
}

/// Least-squares slope of `log₂ y` against `log₂ x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| math::log2(*v)).collect();
    let ly: Vec<f64> = ys.iter().map(|v| math::log2(*v)).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `(d_φ Evol)(ψ)` in left-trivialized coordinates at `∮φ`, with the tangent
/// vector `dL_{∮φ}` of it.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolDifferential {
    pub left_trivialized: Vector,
    pub tangent: Vector,
    pub endpoint: GroupElement,
}

pub fn evol_differential(group: &GroupSpec, phi: &Curve, psi: &Curve, cfg: &CalculusConfig) -> Result<EvolDifferential> {
    let fam = ParamFamily::affine(phi, psi)?;
    let eta = param_formula(group, &fam, 0.0, cfg)?;
    let endpoint = precise_endpoint(group, phi, cfg.steps)?;
    Ok(EvolDifferential {
        tangent: group.left_translate(&endpoint, &eta),
        left_trivialized: eta,
        endpoint,
    })
}

/// `(d_φ Evol)(ψ)` against the central difference of `h ↦ ∮(φ + hψ)`.
pub fn evol_differential_check(group: &GroupSpec, phi: &Curve, psi: &Curve, cfg: &CalculusConfig) -> Result<DerivativeCheck> {
    param_derivative(group, &ParamFamily::affine(phi, psi)?, 0.0, cfg)
}

/// The three sides of Duhamel's formula at `x`, left-trivialized.
#[derive(Clone, Debug, PartialEq)]
pub struct DuhamelReport {
    /// Central difference of `x ↦ exp(X(x))`, pulled back by `dL_{exp X}⁻¹`.
    pub lhs: Vector,
    /// `∫₀¹ Ad_{exp(−sX)}(∂ₓX) ds`
    pub rhs_integral: Vector,
    /// `Σ (−ad_X)ⁿ(∂ₓX)/(n+1)!`
    pub rhs_closed: Vector,
    /// Relative gaps `lhs` vs `rhs_integral`, `lhs` vs `rhs_closed`, and between the right sides.
    pub gap_integral: f64,
    pub gap_closed: f64,
    pub gap_forms: f64,
}

pub fn duhamel(group: &GroupSpec, path: &Curve, x: f64, cfg: &CalculusConfig) -> Result<DuhamelReport> {
    let xv = path.eval(x);
    let dx = path.velocity(x);
    let lhs = chart_derivative(group, &cfg.fd_steps, |h| Ok(group.exp(&path.eval(x + h))))?;
    Ok(duhamel_sides(group, &xv, &dx, lhs))
}

/// Plain central difference at step `h` for the Duhamel left side.
pub fn duhamel_plain(group: &GroupSpec, path: &Curve, x: f64, h: f64) -> Result<DuhamelReport> {
    let base = group.exp(&path.eval(x));
    let plus = group.chart(&group.quotient(&base, &group.exp(&path.eval(x + h))))?;
    let minus = group.chart(&group.quotient(&base, &group.exp(&path.eval(x - h))))?;
    let lhs = linalg::scale(&linalg::sub(&plus, &minus), 0.5 / h);
    Ok(duhamel_sides(group, &path.eval(x), &path.velocity(x), lhs))
}

fn duhamel_sides(group: &GroupSpec, xv: &[f64], dx: &[f64], lhs: Vector) -> DuhamelReport {
    let rhs_integral = CompositeGauss::default().integrate_vector(
        |s| group.ad(&group.exp(&linalg::scale(xv, -s)), dx),
        0.0,
        1.0,
        xv.len(),
    );
    let rhs_closed = adjoint::dexp_factor(group, xv, dx)
        .map(|r| r.value)
        .unwrap_or_else(|_| alloc::vec![f64::NAN; dx.len()]);
    let gap = |a: &[f64], b: &[f64]| relative(linalg::norm(&linalg::sub(a, b)), linalg::norm(b));
    DuhamelReport {
        gap_integral: gap(&lhs, &rhs_integral),
        gap_closed: gap(&lhs, &rhs_closed),
        gap_forms: gap(&rhs_integral, &rhs_closed),
        lhs,
        rhs_integral,
        rhs_closed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcvs::FourierTerm;
    use alloc::vec;

    fn analytic() -> Curve {
        Curve::fourier(
            0.0,
            1.0,
            vec![vec![0.2, -0.1, 0.3]],
            vec![FourierTerm {
                frequency: 1.0,
                cos: vec![0.5, 0.0, -0.2],
                sin: vec![0.0, 0.7, 0.1],
            }],
        )
        .unwrap()
    }

    #[test]
    fn directional_derivative_on_so3() {
        let g = GroupSpec::so3();
        let r = directional_derivative_at_zero(&g, &analytic(), &CalculusConfig::default()).unwrap();
        assert!(r.gap < 1e-8, "{}", r.gap);
        let zero = directional_derivative_at_zero(&g, &Curve::zero(0.0, 1.0, 3).unwrap(), &CalculusConfig::default()).unwrap();
        assert_eq!(zero.gap, 0.0);
    }

    #[test]
    fn param_derivative_on_su2() {
        let g = GroupSpec::su2();
        let fam = ParamFamily::new(0.0, 1.0, 3, |x, t| vec![x + math::sin(t), x * x * t, 0.0])
            .unwrap()
            .with_partial(|x, t| vec![1.0, 2.0 * x * t, 0.0])
            .with_lipschitz("euclidean", 0, 3.0);
        let r = param_derivative(&g, &fam, 0.3, &CalculusConfig::default()).unwrap();
        assert!(r.gap < 1e-6, "{}", r.gap);
        assert!(fam.partial_consistency(0.3, 1e-3).unwrap() < 1e-5);
        let bad = fam.clone().with_lipschitz("euclidean", 0, 0.5);
        assert!(matches!(param_derivative(&g, &bad, 0.3, &CalculusConfig::default()), Err(Error::HypothesisViolation { .. })));
    }

    #[test]
    fn evol_differential_at_zero_is_the_integral() {
        let g = GroupSpec::so3();
        let psi = analytic();
        let d = evol_differential(&g, &Curve::zero(0.0, 1.0, 3).unwrap(), &psi, &CalculusConfig::default()).unwrap();
        let int = lcvs::riemann_integral(&psi, 0.0, 1.0).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&d.left_trivialized, &int)) < 1e-10);
    }

    #[test]
    fn duhamel_on_su2_and_heisenberg() {
        let g = GroupSpec::su2();
        let path = Curve::polynomial(0.0, 2.0, vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = duhamel(&g, &path, 0.7, &CalculusConfig::default()).unwrap();
        assert!(r.gap_integral < 1e-7 && r.gap_closed < 1e-7, "{r:?}");
        assert!(r.gap_forms < 1e-10);
        let h = GroupSpec::heisenberg3();
        let line = Curve::linear(0.0, 2.0, vec![0.0; 3], vec![1.0, 0.0, 0.0]).unwrap();
        let r = duhamel(&h, &line, 1.0, &CalculusConfig::default()).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&r.rhs_closed, &[1.0, 0.0, 0.0])) < 1e-15);
    }
}
