//! Adjoint action along curves and the series attached to it.
//!
//! * [`ad_series`]: `α_{X,Y}(t) = Σ tⁿ/n!·ad_Xⁿ(Y)`, which equals
//!   `Ad_{exp(tX)}(Y)`.
//! * [`dexp_factor`]: `Σ (−ad_X)ⁿ/(n+1)!·Z`, the left-trivialized
//!   derivative of `exp` at `X` in direction `Z`.
//! * [`omori_transport`]: `α̇ = [φ, α]`, solved as a plain vector ODE, whose
//!   solution is `Ad_{∮•φ}(Y)`.
//! * [`groenwall_check`] and [`constricted_probe`]: the growth bounds for
//!   `Ad` along evolutions.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::{self, EvolveConfig, Scheme};
use crate::group::GroupSpec;
use crate::lcvs::{Curve, Order, Seminorm};
use crate::linalg::{self, Mat, Vector};
use crate::math;
use crate::quadrature::{self, SIMPSON_TOLERANCE};
use crate::random;

/// Relative size of the last term at which a series is truncated.
pub const SERIES_TOLERANCE: f64 = 1e-16;
/// Maximum number of series terms.
pub const SERIES_CAP: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct AdSeriesResult {
    pub value: Vector,
    pub terms: usize,
    /// Norm of the last term added (zero when the series terminated).
    pub truncation_bound: f64,
    /// The series terminated because a term vanished identically.
    pub nilpotent_exact: bool,
}

/// `Σₙ cₙ·Lⁿ(y)` with `L = ad_x` and coefficients from `coef(n) = cₙ/cₙ₋₁`.
fn series<F: Fn(usize) -> f64>(group: &GroupSpec, x: &[f64], y: &[f64], ratio: F, c0: f64) -> Result<AdSeriesResult> {
    let mut term = linalg::scale(y, c0);
    let mut value = term.clone();
    let mut running = linalg::norm(&value);
    let nilpotent = group.is_nilpotent();
    for n in 1..=SERIES_CAP {
        term = linalg::scale(&group.bracket(x, &term), ratio(n));
        let tn = linalg::norm(&term);
        if tn == 0.0 {
            return Ok(AdSeriesResult {
                value,
                terms: n,
                truncation_bound: 0.0,
                nilpotent_exact: true,
            });
        }
        linalg::axpy(&mut value, 1.0, &term);
        running = running.max(linalg::norm(&value));
        if !nilpotent && tn < SERIES_TOLERANCE * running.max(f64::MIN_POSITIVE) {
            return Ok(AdSeriesResult {
                value,
                terms: n + 1,
                truncation_bound: tn,
                nilpotent_exact: false,
            });
        }
        if !tn.is_finite() {
            break;
        }
    }
    Err(Error::SeriesDiverged {
        terms: SERIES_CAP,
        last: linalg::norm(&term),
    })
}

/// `Σₙ tⁿ/n!·ad_Xⁿ(Y)`
pub fn ad_series(group: &GroupSpec, x: &[f64], y: &[f64], t: f64) -> Result<AdSeriesResult> {
    series(group, x, y, |n| t / n as f64, 1.0)
}

/// `Σₙ (−ad_X)ⁿ(Z)/(n+1)!`
pub fn dexp_factor(group: &GroupSpec, x: &[f64], z: &[f64]) -> Result<AdSeriesResult> {
    series(group, x, z, |n| -1.0 / (n + 1) as f64, 1.0)
}

/// Right-trivialized derivative of `exp`: `Σₙ ad_Xⁿ(Z)/(n+1)!`, so that
/// `d/ds exp(X(s))·exp(X(s))⁻¹ = dexp_right(X, X')`.
pub fn dexp_right(group: &GroupSpec, x: &[f64], z: &[f64]) -> Vector {
    match series(group, x, z, |n| 1.0 / (n + 1) as f64, 1.0) {
        Ok(r) => r.value,
        Err(_) => alloc::vec![f64::NAN; z.len()],
    }
}

/// Solution of the Omori equation on a uniform grid.
#[derive(Clone, Debug)]
pub struct OmoriResult {
    pub nodes: Vec<f64>,
    pub values: Vec<Vector>,
    /// Richardson estimate of the transport error (sup over nodes).
    pub error_estimate: f64,
    /// Sup over nodes of `‖α(t) − Ad_{∮ᵗφ}(Y)‖`.
    pub residual: f64,
    /// Richardson estimate of the evolution used for the comparison.
    pub evolution_estimate: f64,
}

impl OmoriResult {
    /// Piecewise-linear interpolation of the nodal values.
    pub fn curve(&self) -> Result<Curve> {
        let nodes = self.nodes.clone();
        let values = self.values.clone();
        let dim = values[0].len();
        Curve::new(nodes[0], nodes[nodes.len() - 1], dim, Order::Finite(0), move |t, _| {
            let k = nodes.partition_point(|&x| x <= t).clamp(1, nodes.len() - 1) - 1;
            let w = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
            let mut v = linalg::scale(&values[k], 1.0 - w);
            linalg::axpy(&mut v, w, &values[k + 1]);
            alloc::vec![v]
        })
    }
}

fn transport_run(group: &GroupSpec, phi: &Curve, y: &[f64], scheme: Scheme, n: usize) -> (Vec<f64>, Vec<Vector>) {
    let (r, len) = (phi.start(), phi.length());
    let h = len / n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut a = y.to_vec();
    nodes.push(r);
    values.push(a.clone());
    for k in 0..n {
        let t = r + k as f64 * h;
        match scheme {
            Scheme::LieEuler => {
                let da = group.bracket(&phi.eval(t), &a);
                linalg::axpy(&mut a, h, &da);
            }
            Scheme::Midpoint => {
                let k1 = group.bracket(&phi.eval(t), &a);
                let mut mid = a.clone();
                linalg::axpy(&mut mid, 0.5 * h, &k1);
                let k2 = group.bracket(&phi.eval(t + 0.5 * h), &mid);
                linalg::axpy(&mut a, h, &k2);
            }
        }
        nodes.push(if k + 1 == n { phi.end() } else { r + (k + 1) as f64 * h });
        values.push(a.clone());
    }
    (nodes, values)
}

/// Solves `α̇ = [φ, α]`, `α(r) = Y` with the explicit Runge–Kutta method of
/// the same order as `cfg.scheme` (Euler / explicit midpoint) and compares
/// with `Ad_{∮ᵗφ}(Y)` computed from the evolution.
pub fn omori_transport(group: &GroupSpec, phi: &Curve, y: &[f64], cfg: &EvolveConfig) -> Result<OmoriResult> {
    let n = cfg.step_count(phi.length())?;
    let (nodes, values) = transport_run(group, phi, y, cfg.scheme, n);
    let (_, fine) = transport_run(group, phi, y, cfg.scheme, 2 * n);
    let p = cfg.scheme.order() as i32;
    let factor = math::powi(2.0, p) / (math::powi(2.0, p) - 1.0);
    let mut est: f64 = 0.0;
    for (k, v) in values.iter().enumerate() {
        est = est.max(linalg::norm(&linalg::sub(v, &fine[2 * k])) * factor);
    }
    let evo = evolution::evolve(group, phi, cfg)?;
    let mut residual: f64 = 0.0;
    let mut ad_est: f64 = 0.0;
    for (t, v) in nodes.iter().zip(&values) {
        let g = evo.value_at(*t);
        residual = residual.max(linalg::norm(&linalg::sub(v, &group.ad(&g, y))));
        ad_est = ad_est.max(evo.error_estimate * group.submultiplicative_seminorm().eval(y));
    }
    Ok(OmoriResult {
        nodes,
        values,
        error_estimate: est,
        residual,
        evolution_estimate: ad_est,
    })
}

/// Pointwise comparison `w(Ad_{∮ᵗφ}Y)` vs `exp(∫ᵣᵗ w(φ))·w(Y)`.
#[derive(Clone, Debug)]
pub struct GroenwallReport {
    pub nodes: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `rhs + 1e-8 − lhs` per node.
    pub slack: Vec<f64>,
    pub min_slack: f64,
    pub holds: bool,
}

/// Absolute slack allowed in the Grönwall comparison.
pub const GROENWALL_SLACK: f64 = 1e-8;

pub fn groenwall_check(group: &GroupSpec, phi: &Curve, y: &[f64], w: &Seminorm, cfg: &EvolveConfig, grid: usize) -> Result<GroenwallReport> {
    let evo = evolution::evolve(group, phi, cfg)?;
    let grid = grid.max(2);
    let mut nodes = Vec::with_capacity(grid);
    let mut lhs = Vec::with_capacity(grid);
    let mut rhs = Vec::with_capacity(grid);
    let mut slack = Vec::with_capacity(grid);
    let mut integral = 0.0;
    let mut prev = phi.start();
    let wy = w.eval(y);
    for i in 0..grid {
        let t = phi.start() + phi.length() * i as f64 / (grid - 1) as f64;
        integral += quadrature::simpson_scalar(|s| w.eval(&phi.eval(s)), prev, t, SIMPSON_TOLERANCE)?;
        prev = t;
        let l = w.eval(&group.ad(&evo.value_at(t), y));
        let r = math::exp(integral) * wy;
        nodes.push(t);
        lhs.push(l);
        rhs.push(r);
        slack.push(r + GROENWALL_SLACK - l);
    }
    let min_slack = slack.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GroenwallReport {
        nodes,
        lhs,
        rhs,
        slack,
        min_slack,
        holds: min_slack >= 0.0,
    })
}

/// Largest sampled `w([X,Y]) − w(X)·w(Y)`; non-positive for a
/// submultiplicative `w`.
pub fn submultiplicative_defect(group: &GroupSpec, w: &Seminorm, samples: usize, seed: u64) -> f64 {
    let mut rng = random::rng(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let scale: f64 = rng.gen_range(0.1..3.0);
        let x = group.random_algebra(&mut rng, scale);
        let y = group.random_algebra(&mut rng, 1.0);
        worst = worst.max(w.eval(&group.bracket(&x, &y)) - w.eval(&x) * w.eval(&y));
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstrictedReport {
    /// Smallest `C` with `‖ad_{X₁}∘⋯∘ad_{Xₙ}‖ ≤ Cⁿ` on the sample.
    pub c: f64,
    /// Per length `n = 1..=n_max`: the largest `‖ad_{X₁}∘⋯∘ad_{Xₙ}‖^{1/n}`.
    pub per_length: Vec<f64>,
    pub tuples: usize,
    pub seminorm: String,
}

/// Samples tuples from `xs` (with replacement) and measures composed ad
/// operator norms induced by `v`.
pub fn constricted_probe(
    group: &GroupSpec,
    xs: &[Vector],
    v: &Seminorm,
    n_max: usize,
    tuples: usize,
    seed: u64,
) -> Result<ConstrictedReport> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("constricted probe needs a sample set".into()));
    }
    let mut rng = random::rng(seed);
    let d = group.algebra_dim();
    let mut per_length = alloc::vec![0.0f64; n_max];
    for _ in 0..tuples {
        let mut op = Mat::identity(d);
        for (n, slot) in per_length.iter_mut().enumerate() {
            let x = &xs[rng.gen_range(0..xs.len())];
            op = op.mul(&group.ad_matrix(x));
            let norm = v.induced_norm(&op);
            *slot = slot.max(math::powf(norm, 1.0 / (n + 1) as f64));
        }
    }
    let c = per_length.iter().copied().fold(0.0, f64::max);
    Ok(ConstrictedReport {
        c,
        per_length,
        tuples,
        seminorm: v.describe(),
    })
}

/// Outcome of the scalar Grönwall lemma on one constructed family.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGroenwall {
    /// `min_t (C + ∫α·β − α)(t)`: non-negative when the hypothesis holds.
    pub hypothesis_slack: f64,
    /// `min_t (C·exp(∫β) − α)(t)`: non-negative when the conclusion holds.
    pub conclusion_slack: f64,
}

/// Checks the scalar Grönwall lemma for `α = C·u·exp(∫β)` with `u`
/// nonincreasing, `u ≤ 1` and `β ≥ 0`, a family for which the hypothesis
/// `α ≤ C + ∫α·β` holds by construction.
pub fn scalar_groenwall<U, B>(c: f64, u: U, beta: B, start: f64, end: f64, grid: usize) -> Result<ScalarGroenwall>
where
    U: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let grid = grid.max(2);
    let mut big_b = 0.0;
    let mut alpha_beta = 0.0;
    let mut prev = start;
    let mut hyp = f64::INFINITY;
    let mut concl = f64::INFINITY;
    let tol = 1e-13;
    for i in 0..grid {
        let t = start + (end - start) * i as f64 / (grid - 1) as f64;
        // ∫α·β over [prev, t] with the running exponent carried inside
        let b0 = big_b;
        alpha_beta += quadrature::simpson_scalar(
            |s| {
                let bs = b0 + quadrature::simpson_scalar(&beta, prev, s, tol).unwrap_or(f64::NAN);
                c * u(s) * math::exp(bs) * beta(s)
            },
            prev,
            t,
            1e-11,
        )?;
        big_b += quadrature::simpson_scalar(&beta, prev, t, tol)?;
        prev = t;
        let alpha = c * u(t) * math::exp(big_b);
        hyp = hyp.min(c + alpha_beta - alpha);
        concl = concl.min(c * math::exp(big_b) - alpha);
    }
    Ok(ScalarGroenwall {
        hypothesis_slack: hyp,
        conclusion_slack: concl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use alloc::vec;

    #[test]
    fn heisenberg_series_terminates() {
        let g = GroupSpec::heisenberg3();
        let r = ad_series(&g, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0).unwrap();
        assert_eq!(r.value, vec![0.0, 1.0, 1.0]);
        assert!(r.nilpotent_exact);
        let d = dexp_factor(&g, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.value, vec![0.0, 1.0, -0.5]);
    }

    #[test]
    fn series_matches_conjugation() {
        let mut rng = random::rng(9);
        for name in ["so3", "su2", "gl(3)", "unit_group(2)"] {
            let g = make_group(name).unwrap();
            let x = g.random_algebra(&mut rng, 1.5);
            let y = g.random_algebra(&mut rng, 1.0);
            let s = ad_series(&g, &x, &y, 0.8).unwrap();
            let direct = g.ad(&g.exp(&linalg::scale(&x, 0.8)), &y);
            assert!(linalg::max_abs(&linalg::sub(&s.value, &direct)) < 1e-12, "{name}");
            assert!(s.truncation_bound <= 1e-15 * linalg::norm(&s.value));
        }
    }

    #[test]
    fn so3_unit_ball_is_constricted_by_one() {
        let g = GroupSpec::so3();
        let mut rng = random::rng(4);
        let xs: Vec<Vector> = (0..50).map(|_| random::unit_vector(&mut rng, 3)).collect();
        let r = constricted_probe(&g, &xs, &Seminorm::Euclidean, 6, 100, 1).unwrap();
        assert!(r.c <= 1.0 + 1e-9);
        assert!(r.c > 0.9);
        let zeros = vec![vec![0.0; 3]];
        assert_eq!(constricted_probe(&g, &zeros, &Seminorm::Euclidean, 6, 10, 1).unwrap().c, 0.0);
    }

    #[test]
    fn scalar_lemma_on_a_decaying_family() {
        let r = scalar_groenwall(2.0, |t| 1.0 / (1.0 + t), |t| 1.0 + math::sin(3.0 * t).abs(), 0.0, 1.0, 21).unwrap();
        assert!(r.hypothesis_slack >= -1e-10);
        assert!(r.conclusion_slack >= 0.0);
    }
}
