//! Bump reparameterizations and smoothing of piecewise curves.
//!
//! The bump `ρ̂(t) = c₀·exp(−1/(4t(1−t)))` is the mollifier profile moved to
//! `[0,1]`. Gluing one scaled copy per segment gives `ϱ`, which fixes every
//! breakpoint and is flat there to all orders, so `ψ = ϱ̇·(φ∘ϱ)` is smooth
//! and has the same product integral as `φ`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::jet::{self, Jet};
use crate::lcvs::{self, Curve, Mollifier, Order, PiecewiseCurve, Seminorm};
use crate::linalg::{self, Vector};
use crate::math;
use crate::quadrature;
use crate::random;

const TABLE_PANELS: usize = 256;
const PANEL_POINTS: usize = 12;

/// The normalized bump on `[0,1]` with a tabulated antiderivative.
#[derive(Clone, Debug)]
pub struct BumpProfile {
    mollifier: Mollifier,
    scale: f64,
    cumulative: Arc<Vec<f64>>,
    nodes: Arc<(Vec<f64>, Vec<f64>)>,
}

/// The shared bump profile.
pub fn bump() -> BumpProfile {
    let mollifier = lcvs::mollifier();
    let nodes = quadrature::gauss_legendre(PANEL_POINTS);
    let mut profile = BumpProfile {
        mollifier,
        scale: 1.0,
        cumulative: Arc::new(Vec::new()),
        nodes: Arc::new(nodes),
    };
    let mut cumulative = Vec::with_capacity(TABLE_PANELS + 1);
    let mut acc = 0.0;
    cumulative.push(0.0);
    for k in 0..TABLE_PANELS {
        let a = k as f64 / TABLE_PANELS as f64;
        acc += profile.panel(a, a + 1.0 / TABLE_PANELS as f64);
        cumulative.push(acc);
    }
    profile.scale = 1.0 / acc;
    profile.cumulative = Arc::new(cumulative.into_iter().map(|v| v / acc).collect());
    profile
}

impl BumpProfile {
    /// Normalization constant `c₀` in `c₀·exp(−1/(4t(1−t)))`.
    pub fn normalization(&self) -> f64 {
        2.0 * self.mollifier.normalization() * self.scale
    }

    /// Derivatives `0..=order` of `ρ̂` at `t`; zero outside `(0,1)`.
    pub fn eval(&self, t: f64, order: usize) -> Vec<f64> {
        let d = self.mollifier.profile(2.0 * t - 1.0, order);
        let mut f = 2.0 * self.scale;
        d.into_iter()
            .map(|v| {
                let out = f * v;
                f *= 2.0;
                out
            })
            .collect()
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t, 0)[0]
    }

    fn panel(&self, a: f64, b: f64) -> f64 {
        let (x, w) = &*self.nodes;
        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
        x.iter().zip(w).map(|(xi, wi)| wi * self.value(m + r * xi)).sum::<f64>() * r
    }

    /// `∫₀ᵗ ρ̂`, clamped to `[0,1]`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        if t > 0.5 {
            return 1.0 - self.antiderivative(1.0 - t);
        }
        let k = math::floor(t * TABLE_PANELS as f64) as usize;
        let a = k as f64 / TABLE_PANELS as f64;
        self.cumulative[k] + if t > a { self.panel(a, t) } else { 0.0 }
    }

    /// Grid maximum of `ρ̂`.
    pub fn max_value(&self, grid: usize) -> f64 {
        (0..=grid).map(|i| self.value(i as f64 / grid as f64)).fold(0.0, f64::max)
    }
}

fn locate(breakpoints: &[f64], t: f64) -> usize {
    let idx = breakpoints.partition_point(|&b| b <= t);
    idx.saturating_sub(1).min(breakpoints.len() - 2)
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("breakpoints must be strictly increasing, at least two".into()));
    }
    Ok(())
}

/// Derivatives `0..=order` of `ϱ` on segment `[a, b]` at `t`.
fn reparam_jet(profile: &BumpProfile, a: f64, b: f64, t: f64, order: usize) -> Vec<f64> {
    let len = b - a;
    let tau = (t - a) / len;
    let mut out = Vec::with_capacity(order + 1);
    out.push(a + len * profile.antiderivative(tau));
    if order > 0 {
        let mut f = 1.0;
        for v in profile.eval(tau, order - 1) {
            out.push(f * v);
            f /= len;
        }
    }
    out
}

/// `ϱ(t) = t_p + (t_{p+1} − t_p)·B((t − t_p)/(t_{p+1} − t_p))` with `B' = ρ̂`.
pub fn reparam_profile(breakpoints: &[f64]) -> Result<Curve> {
    check_breakpoints(breakpoints)?;
    let bp: Vec<f64> = breakpoints.to_vec();
    let profile = bump();
    let (start, end) = (bp[0], bp[bp.len() - 1]);
    Curve::new(start, end, 1, Order::Smooth, move |t, s| {
        let p = locate(&bp, t);
        reparam_jet(&profile, bp[p], bp[p + 1], t, s).into_iter().map(|v| vec![v]).collect()
    })
}

fn smoothed_jet(profile: &BumpProfile, pw: &PiecewiseCurve, p: usize, t: f64, s: usize) -> Vec<Vector> {
    let bp = pw.breakpoints();
    let r = reparam_jet(profile, bp[p], bp[p + 1], t, s + 1);
    let outer = pw.segments()[p].raw_jet(r[0].clamp(bp[p], bp[p + 1]), s);
    let composed = jet::compose_vector(&outer, &Jet::from_derivatives(&r[..=s]));
    jet::scalar_times_vector(&Jet::from_derivatives(&r[1..]), &composed)
}

/// `ψ = ϱ̇·(φ∘ϱ)` for the bump reparameterization of the breakpoints of `pw`.
pub fn smooth_piecewise(pw: &PiecewiseCurve) -> Result<Curve> {
    let profile = bump();
    let order = pw.segments().iter().fold(Order::Smooth, |o, s| o.min(s.order()));
    let src = pw.clone();
    Curve::new(pw.start(), pw.end(), pw.dim(), order, move |t, s| {
        let p = locate(src.breakpoints(), t);
        smoothed_jet(&profile, &src, p, t, s)
    })
}

/// Largest difference between the one-sided derivatives (orders `0..=order`)
/// of the smoothed curve at the interior breakpoints.
pub fn breakpoint_jumps(pw: &PiecewiseCurve, order: usize) -> f64 {
    let profile = bump();
    let bp = pw.breakpoints();
    let mut worst: f64 = 0.0;
    for p in 1..bp.len() - 1 {
        let left = smoothed_jet(&profile, pw, p - 1, bp[p], order);
        let right = smoothed_jet(&profile, pw, p, bp[p], order);
        for (l, r) in left.iter().zip(&right) {
            worst = worst.max(linalg::max_abs(&linalg::sub(l, r)));
        }
    }
    worst
}

/// `(sup p(ψ), sup p(φ))` on `grid` points of each segment.
pub fn sup_inflation(pw: &PiecewiseCurve, psi: &Curve, p: &Seminorm, grid: usize) -> (f64, f64) {
    let mut sup_psi: f64 = 0.0;
    let mut sup_phi: f64 = 0.0;
    for (k, seg) in pw.segments().iter().enumerate() {
        let (a, b) = (pw.breakpoints()[k], pw.breakpoints()[k + 1]);
        for i in 0..=grid {
            let t = a + (b - a) * i as f64 / grid as f64;
            sup_phi = sup_phi.max(p.eval(&seg.eval(t)));
            sup_psi = sup_psi.max(p.eval(&psi.eval(t)));
        }
    }
    (sup_psi, sup_phi)
}

/// Group elements `g₀, g₁, …, g_N` together with the data of the glueing
/// schedule: `tₙ = 1 − 2⁻ⁿ`, `δₙ = 2^{−(n+1)}`, `Xₙ = Ξ(gₙ⁻¹·g_{n−1})` and
/// `Yₙ = 2ⁿ⁺¹·Xₙ` for `n ≥ 1`.
#[derive(Clone, Debug)]
pub struct MackeySchedule {
    group: GroupSpec,
    elements: Vec<GroupElement>,
    increments: Vec<Vector>,
}

impl MackeySchedule {
    pub fn new(group: &GroupSpec, elements: Vec<GroupElement>) -> Result<Self> {
        if elements.len() < 2 {
            return Err(Error::InvalidArgument("a schedule needs at least g₀ and g₁".into()));
        }
        let mut increments = vec![linalg::zeros(group.algebra_dim())];
        for w in elements.windows(2) {
            increments.push(group.chart(&group.quotient(&w[1], &w[0]))?);
        }
        Ok(Self {
            group: group.clone(),
            elements,
            increments,
        })
    }

    /// A schedule whose increments are random directions of operator
    /// seminorm in `[½, 1]·c·2^{−n²}`, starting from `g₀`.
    pub fn decaying<R: Rng + ?Sized>(group: &GroupSpec, g0: GroupElement, n: usize, c: f64, rng: &mut R) -> Result<Self> {
        let op = group.operator_seminorm();
        let mut elements = vec![g0];
        for k in 1..=n {
            let dir = random::unit_vector(rng, group.algebra_dim());
            let size = c * math::powi(2.0, -((k * k) as i32)) * (1.0 - 0.5 * rng.gen::<f64>());
            let x = linalg::scale(&dir, size / op.eval(&dir));
            let prev = &elements[k - 1];
            elements.push(group.mul(prev, &group.inv(&group.unchart(&x)?)));
        }
        Self::new(group, elements)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Largest index `N` with a defined increment.
    pub fn len(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `tₙ = 1 − 2⁻ⁿ`
    pub fn breakpoint(n: usize) -> f64 {
        1.0 - math::powi(2.0, -(n as i32))
    }

    /// `Xₙ` for `1 ≤ n ≤ N`.
    pub fn increment(&self, n: usize) -> &Vector {
        &self.increments[n]
    }

    /// `Yₙ = 2ⁿ⁺¹·Xₙ`
    pub fn scaled_increment(&self, n: usize) -> Vector {
        linalg::scale(&self.increments[n], math::powi(2.0, n as i32 + 1))
    }

    /// First `n ≤ N` with `‖Xₙ‖_op > c·2^{−n²}`.
    pub fn check_decay(&self, n_max: usize, c: f64) -> Result<()> {
        let op = self.group.operator_seminorm();
        for n in 1..=n_max.min(self.len()) {
            let norm = op.eval(&self.increments[n]);
            let bound = c * math::powi(2.0, -((n * n) as i32));
            if norm > bound {
                return Err(Error::DecayViolation { n, norm, bound });
            }
        }
        Ok(())
    }

    /// `Ξ⁻¹(X_N)⋯Ξ⁻¹(X₁)`
    pub fn finite_product(&self, n: usize) -> Result<GroupElement> {
        let mut g = self.group.identity();
        for k in 1..=n.min(self.len()) {
            g = self.group.mul(&self.group.unchart(&self.increments[k])?, &g);
        }
        Ok(g)
    }
}

/// Smooth curve on `[0,1]` equal to `ρₙ·(Der(Ξ⁻¹∘γₙ)∘ϱₙ)` on `[tₙ, tₙ₊₁]`
/// for `1 ≤ n ≤ N`, with `γₙ(t) = (t−tₙ)·Yₙ`, and zero elsewhere. Its
/// product integral up to `t_{N+1}` is `Ξ⁻¹(X_N)⋯Ξ⁻¹(X₁) = g_N⁻¹·g₀`.
pub fn mackey_glue(seq: &MackeySchedule, n: usize, c: f64) -> Result<Curve> {
    let n = n.min(seq.len());
    seq.check_decay(n, c)?;
    let group = seq.group.clone();
    let ys: Vec<Vector> = (0..=n).map(|k| seq.scaled_increment(k)).collect();
    let profile = bump();
    let dim = group.algebra_dim();
    let t_end = MackeySchedule::breakpoint(n + 1);
    Curve::new(0.0, 1.0, dim, Order::Smooth, move |t, s| {
        let t1 = MackeySchedule::breakpoint(1);
        if t < t1 || t >= t_end {
            return vec![linalg::zeros(dim); s + 1];
        }
        let k = math::floor(-math::log2(1.0 - t)) as usize;
        let mut k = k.clamp(1, n);
        while k < n && t >= MackeySchedule::breakpoint(k + 1) {
            k += 1;
        }
        while k > 1 && t < MackeySchedule::breakpoint(k) {
            k -= 1;
        }
        let (a, b) = (MackeySchedule::breakpoint(k), MackeySchedule::breakpoint(k + 1));
        let r = reparam_jet(&profile, a, b, t, s + 1);
        let outer = group.chart_line_derivatives(&ys[k], r[0] - a, s);
        let composed = jet::compose_vector(&outer, &Jet::from_derivatives(&r[..=s]));
        jet::scalar_times_vector(&Jet::from_derivatives(&r[1..]), &composed)
    })
}
