//! Sampling probes of local μ-convexity and of the continuity estimates it
//! implies.
//!
//! A probe can only fail to find a violation; reports never claim more.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::{self, EvolveConfig};
use crate::group::GroupSpec;
use crate::lcvs::{Curve, Order, Seminorm};
use crate::linalg::{self, Vector};
use crate::logderiv;
use crate::quadrature::CompositeGauss;
use crate::random;

/// Slack added to the right side of the μ-convexity inequality.
pub const PROBE_SLACK: f64 = 1e-9;
/// Slack of the continuity estimates.
pub const CONTINUITY_SLACK: f64 = 1e-6;

/// Outcome of a sampling probe. `max_violation` is `max(0, lhs − rhs)` over
/// all samples; the witness is the sample with the largest `lhs − rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub samples: usize,
    pub violations: usize,
    pub chart_exits: usize,
    pub max_violation: f64,
    /// Largest `lhs − rhs` seen, possibly negative.
    pub worst_margin: f64,
    pub witness_index: usize,
    pub witness: Vec<Vector>,
    pub description: String,
}

impl ProbeReport {
    fn empty(description: String) -> Self {
        Self {
            samples: 0,
            violations: 0,
            chart_exits: 0,
            max_violation: 0.0,
            worst_margin: f64::NEG_INFINITY,
            witness_index: 0,
            witness: Vec::new(),
            description,
        }
    }

    fn record(&mut self, index: usize, margin: f64, slack: f64, witness: impl FnOnce() -> Vec<Vector>) {
        self.samples += 1;
        if margin > slack {
            self.violations += 1;
        }
        self.max_violation = self.max_violation.max(margin);
        if margin > self.worst_margin {
            self.worst_margin = margin;
            self.witness_index = index;
            self.witness = witness();
        }
    }

    /// No violation found among the samples.
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Associative merge of reports over disjoint sample ranges.
    pub fn merge(mut self, other: ProbeReport) -> ProbeReport {
        self.samples += other.samples;
        self.violations += other.violations;
        self.chart_exits += other.chart_exits;
        self.max_violation = self.max_violation.max(other.max_violation);
        if other.worst_margin > self.worst_margin || (other.worst_margin == self.worst_margin && other.witness_index < self.witness_index) {
            self.worst_margin = other.worst_margin;
            self.witness_index = other.witness_index;
            self.witness = other.witness;
        }
        self
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            alloc::format!(
                "no violation found in {} samples ({} chart exits); {}",
                self.samples,
                self.chart_exits,
                self.description
            )
        } else {
            alloc::format!(
                "{} violations in {} samples, max {:.3e} at sample {}; {}",
                self.violations,
                self.samples,
                self.max_violation,
                self.witness_index,
                self.description
            )
        }
    }
}

/// A tuple shape: directions with `o(dᵢ) = 1`, Dirichlet weights and budget.
#[derive(Clone, Debug)]
struct Shape {
    directions: Vec<Vector>,
    weights: Vec<f64>,
    budget: f64,
}

fn draw_shape<R: Rng + ?Sized>(rng: &mut R, group: &GroupSpec, o: &Seminorm, n_max: usize) -> Shape {
    let n = rng.gen_range(1..=n_max.max(1));
    let directions = (0..n)
        .map(|_| loop {
            let d = random::gaussian_vector(rng, group.algebra_dim());
            let r = o.eval(&d);
            if r > 1e-12 {
                break linalg::scale(&d, 1.0 / r);
            }
        })
        .collect();
    let weights = random::dirichlet(rng, n);
    let budget = 1.0 - rng.gen::<f64>();
    Shape {
        directions,
        weights,
        budget,
    }
}

impl Shape {
    /// Tuple `Xᵢ = budget·wᵢ·dᵢ/c`, so that `Σ c·o(Xᵢ) = budget`.
    fn tuple(&self, c: f64) -> Vec<Vector> {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| linalg::scale(d, self.budget * w / c))
            .collect()
    }
}

/// `(u∘Ξ)(Ξ⁻¹X₁⋯Ξ⁻¹Xₙ) − Σo(Xᵢ)`, or `None` when the product leaves the chart.
fn margin(group: &GroupSpec, u: &Seminorm, o: &Seminorm, xs: &[Vector]) -> Option<f64> {
    let mut g = group.identity();
    for x in xs {
        g = group.mul(&g, &group.unchart(x).ok()?);
    }
    let lhs = u.eval(&group.chart(&g).ok()?);
    let rhs: f64 = xs.iter().map(|x| o.eval(x)).sum();
    Some(lhs - rhs)
}

fn check_dominates(group: &GroupSpec, u: &Seminorm, o: &Seminorm, seed: u64) -> Result<()> {
    let mut rng = random::split(seed, u64::MAX);
    for _ in 0..256 {
        let x = random::gaussian_vector(&mut rng, group.algebra_dim());
        if o.eval(&x) < u.eval(&x) * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(alloc::format!(
                "o = {} does not dominate u = {}",
                o.describe(),
                u.describe()
            )));
        }
    }
    Ok(())
}

fn probe_description(group: &GroupSpec, u: &Seminorm, o: &Seminorm, n_max: usize) -> String {
    alloc::format!("{}: u = {}, o = {}, n_max = {}", group.name(), u.describe(), o.describe(), n_max)
}

/// Samples `range` of a probe; sample `i` draws from the stream `split(seed, i)`.
pub fn mu_convex_probe_range(
    group: &GroupSpec,
    u: &Seminorm,
    o: &Seminorm,
    n_max: usize,
    range: core::ops::Range<usize>,
    seed: u64,
) -> ProbeReport {
    let mut report = ProbeReport::empty(probe_description(group, u, o, n_max));
    for i in range {
        let mut rng = random::split(seed, i as u64);
        let xs = draw_shape(&mut rng, group, o, n_max).tuple(1.0);
        match margin(group, u, o, &xs) {
            Some(m) => report.record(i, m, PROBE_SLACK, || xs.clone()),
            None => {
                report.samples += 1;
                report.chart_exits += 1;
            }
        }
    }
    report
}

/// Checks `(u∘Ξ)(Ξ⁻¹X₁⋯Ξ⁻¹Xₙ) ≤ Σo(Xᵢ)` on random tuples with `Σo(Xᵢ) ≤ 1`.
pub fn mu_convex_probe(group: &GroupSpec, u: &Seminorm, o: &Seminorm, n_max: usize, samples: usize, seed: u64) -> Result<ProbeReport> {
    check_dominates(group, u, o, seed)?;
    Ok(mu_convex_probe_range(group, u, o, n_max, 0..samples, seed))
}

/// Smallest `c ∈ [lo, hi]` (bisection to relative width 1e-2) such that the
/// probe with `o = c·u` finds no violation on a fixed sample set.
pub fn find_o(group: &GroupSpec, u: &Seminorm, lo: f64, hi: f64, n_max: usize, samples: usize, seed: u64) -> Result<(f64, ProbeReport)> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument("search range must satisfy 0 < lo ≤ hi".into()));
    }
    let shapes: Vec<Shape> = (0..samples)
        .map(|i| draw_shape(&mut random::split(seed, i as u64), group, u, n_max))
        .collect();
    let run = |c: f64| -> ProbeReport {
        let o = u.clone().scaled(c);
        let mut report = ProbeReport::empty(probe_description(group, u, &o, n_max));
        for (i, s) in shapes.iter().enumerate() {
            let xs = s.tuple(c);
            match margin(group, u, &o, &xs) {
                Some(m) => report.record(i, m, PROBE_SLACK, || xs.clone()),
                None => {
                    report.samples += 1;
                    report.chart_exits += 1;
                }
            }
        }
        report
    };
    let first = run(lo);
    if first.passed() {
        return Ok((lo, first));
    }
    let mut best = run(hi);
    if !best.passed() {
        return Err(Error::InvalidArgument(alloc::format!("no passing multiple up to {hi}: {}", best.summary())));
    }
    let (mut a, mut b) = (lo, hi);
    while (b - a) > 1e-2 * b {
        let m = 0.5 * (a + b);
        let r = run(m);
        if r.passed() {
            b = m;
            best = r;
        } else {
            a = m;
        }
    }
    Ok((b, best))
}

/// `2·Σεₖ − ((1+ε₁)⋯(1+εₙ) − 1)`, nonnegative whenever `Σεₖ ≤ ½`.
pub fn product_bound_slack(eps: &[f64]) -> f64 {
    let prod: f64 = eps.iter().map(|e| 1.0 + e).product();
    2.0 * eps.iter().sum::<f64>() - (prod - 1.0)
}

/// Cumulative `∫ᵣᵗ q(φ)` at the points of a uniform grid.
fn cumulative_seminorm(phi: &Curve, q: &Seminorm, grid: &[f64]) -> Vec<f64> {
    let rule = CompositeGauss::new(4, 12);
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        acc += rule.integrate(|s| q.eval(&phi.eval(s)), w[0], w[1]);
        out.push(acc);
    }
    out
}

/// Grid check of `(p∘Ξ)(∮ᵣᵗφ) ≤ ∫ᵣᵗ q(φ(s)) ds` for each curve, scaled so
/// that `∫q(φ) ≤ 1`.
pub fn continuity_bound_check(group: &GroupSpec, p: &Seminorm, q: &Seminorm, phis: &[Curve], cfg: &EvolveConfig) -> Result<ProbeReport> {
    let mut report = ProbeReport::empty(alloc::format!(
        "{}: p = {}, q = {}, {} curves",
        group.name(),
        p.describe(),
        q.describe(),
        phis.len()
    ));
    let grid_n = 65;
    for (i, phi) in phis.iter().enumerate() {
        let grid: Vec<f64> = logderiv::grid(phi.start(), phi.end(), grid_n).collect();
        let total = cumulative_seminorm(phi, q, &grid)[grid_n - 1];
        let phi = if total > 1.0 { phi.scale(1.0 / total) } else { phi.clone() };
        let rhs = cumulative_seminorm(&phi, q, &grid);
        let evo = evolution::evolve(group, &phi, cfg)?;
        for (k, &t) in grid.iter().enumerate() {
            let slack = CONTINUITY_SLACK + evo.error_estimate;
            match group.chart(&evo.value_at(t)) {
                Ok(x) => report.record(i, p.eval(&x) - rhs[k], slack, || alloc::vec![alloc::vec![t]]),
                Err(_) => {
                    report.samples += 1;
                    report.chart_exits += 1;
                }
            }
        }
    }
    Ok(report)
}

/// The inverse of `Λ(t) = (∫ᵣᵗ (q(φ) + ε))/(∫ᵣʳ' (q(φ) + ε))` rescaled to
/// `[r, r']`: along it `q(ϱ̇·φ∘ϱ)` is nearly constant.
pub fn arclength_reparam(phi: &Curve, q: &Seminorm, eps: f64) -> Result<Curve> {
    let panels = 512;
    let (r, len) = (phi.start(), phi.length());
    let rule = CompositeGauss::new(1, 12);
    let speed = {
        let phi = phi.clone();
        let q = q.clone();
        move |s: f64| q.eval(&phi.eval(s)) + eps
    };
    let mut table = alloc::vec![0.0];
    for k in 0..panels {
        let a = r + len * k as f64 / panels as f64;
        let b = r + len * (k + 1) as f64 / panels as f64;
        let v = table[k] + rule.integrate(&speed, a, b);
        table.push(v);
    }
    let total = table[panels];
    let lambda = {
        let table = table.clone();
        let speed = speed.clone();
        move |t: f64| -> f64 {
            let k = ((t - r) / len * panels as f64).clamp(0.0, panels as f64 - 1.0) as usize;
            let a = r + len * k as f64 / panels as f64;
            let extra = if t > a { CompositeGauss::new(1, 12).integrate(&speed, a, t) } else { 0.0 };
            table[k] + extra
        }
    };
    let inverse = move |tau: f64| -> f64 {
        let target = (tau - r) / len * total;
        let k = table.partition_point(|&v| v <= target).clamp(1, panels) - 1;
        let (mut lo, mut hi) = (r + len * k as f64 / panels as f64, r + len * (k + 1) as f64 / panels as f64);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..60 {
            let f = lambda(t) - target;
            if f.abs() <= 1e-15 * total {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - f / speed(t);
            t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        t
    };
    let speed2 = {
        let phi = phi.clone();
        let q = q.clone();
        move |s: f64| q.eval(&phi.eval(s)) + eps
    };
    Curve::new(r, phi.end(), 1, Order::Finite(1), move |tau, s| {
        let t = if tau <= r {
            r
        } else if tau >= r + len {
            r + len
        } else {
            inverse(tau)
        };
        let mut out = alloc::vec![alloc::vec![t]];
        if s >= 1 {
            out.push(alloc::vec![total / (len * speed2(t))]);
        }
        out
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Report {
    pub bound: ProbeReport,
    /// Residual and tolerance of the curve closest to failing.
    pub reparam_residual: f64,
    pub reparam_tolerance: f64,
}

/// Evaluates, per curve, the L¹ estimate `(p∘Ξ)(∮φ) ≤ ∫q(φ)` and the
/// reparameterization `∮φ = ∮ϱ̇·φ∘ϱ` with the arclength-equalizing `ϱ`.
pub fn l1_continuity_check(group: &GroupSpec, p: &Seminorm, q: &Seminorm, phis: &[Curve], cfg: &EvolveConfig) -> Result<L1Report> {
    let mut bound = ProbeReport::empty(alloc::format!("{}: p = {}, q = {}, L1", group.name(), p.describe(), q.describe()));
    let mut worst_excess = f64::NEG_INFINITY;
    let (mut residual, mut tolerance) = (0.0, 0.0);
    for (i, phi) in phis.iter().enumerate() {
        let grid: Vec<f64> = logderiv::grid(phi.start(), phi.end(), 2).collect();
        let l1 = cumulative_seminorm(phi, q, &grid)[1];
        let phi = if l1 > 1.0 { phi.scale(1.0 / l1) } else { phi.clone() };
        let l1 = l1.min(1.0);
        let direct = evolution::evolve(group, &phi, cfg)?;
        match group.chart(&direct.endpoint) {
            Ok(x) => bound.record(i, p.eval(&x) - l1, CONTINUITY_SLACK + direct.error_estimate, || alloc::vec![]),
            Err(_) => {
                bound.samples += 1;
                bound.chart_exits += 1;
            }
        }
        let rho = arclength_reparam(&phi, q, 1e-3)?;
        let moved = evolution::evolve(group, &phi.substitute(&rho)?, cfg)?;
        let res = group.chart_distance(&direct.endpoint, &moved.endpoint).value;
        let tol = (5.0 * (direct.error_estimate + moved.error_estimate)).max(1e-12);
        if res - tol > worst_excess {
            worst_excess = res - tol;
            residual = res;
            tolerance = tol;
        }
    }
    Ok(L1Report {
        bound,
        reparam_residual: residual,
        reparam_tolerance: tolerance,
    })
}
