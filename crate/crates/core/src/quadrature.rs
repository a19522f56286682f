//! Quadrature rules shared by the integration, smoothing and convolution code.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::math;

/// Relative convergence threshold of the Simpson halving loop.
pub const SIMPSON_TOLERANCE: f64 = 1e-12;
/// Upper bound on halvings: `2^MAX_HALVINGS` panels.
pub const MAX_HALVINGS: usize = 22;

/// Composite Simpson integration with interval halving.
///
/// The panel count is doubled until two successive estimates differ by less
/// than `tol · max(1, ‖S‖∞)` in the max norm; the last two estimates are then
/// combined by one Richardson step. `a > b` flips the sign and `a = b`
/// returns zero.
pub fn simpson<F>(f: F, a: f64, b: f64, dim: usize, tol: f64) -> Result<Vector>
where
    F: Fn(f64) -> Vector,
{
    if a == b {
        return Ok(linalg::zeros(dim));
    }
    if a > b {
        return simpson(f, b, a, dim, tol).map(|v| linalg::scale(&v, -1.0));
    }
    let eval = |t: f64| -> Result<Vector> {
        let v = f(t);
        if !linalg::is_finite(&v) {
            return Err(Error::NonFiniteIntegrand { t });
        }
        Ok(v)
    };
    // Simpson on n panels = (T(n) + 2 M(n)) / 3 with trapezoid T and midpoint M.
    let mut n = 2usize;
    let h0 = (b - a) / n as f64;
    let fa = eval(a)?;
    let fb = eval(b)?;
    let endpoint_sum = linalg::add(&fa, &fb);
    let mut interior = linalg::zeros(dim);
    for i in 1..n {
        linalg::axpy(&mut interior, 1.0, &eval(a + i as f64 * h0)?);
    }
    let trapezoid = |sum_ends: &Vector, inner: &Vector, h: f64| -> Vector {
        let mut t = linalg::scale(sum_ends, 0.5 * h);
        linalg::axpy(&mut t, h, inner);
        t
    };
    let mut t_prev = trapezoid(&endpoint_sum, &interior, h0);
    let mut s_prev: Option<Vector> = None;
    for _ in 0..MAX_HALVINGS {
        let h = (b - a) / n as f64;
        let mut mids = linalg::zeros(dim);
        for i in 0..n {
            linalg::axpy(&mut mids, 1.0, &eval(a + (i as f64 + 0.5) * h)?);
        }
        let m = linalg::scale(&mids, h);
        let mut s = linalg::scale(&t_prev, 1.0 / 3.0);
        linalg::axpy(&mut s, 2.0 / 3.0, &m);
        if let Some(sp) = &s_prev {
            let diff = linalg::max_abs(&linalg::sub(&s, sp));
            if diff <= tol * linalg::max_abs(&s).max(1.0) {
                let mut out = s.clone();
                linalg::axpy(&mut out, 1.0 / 15.0, &linalg::sub(&s, sp));
                return Ok(out);
            }
        }
        // Next level trapezoid: average of trapezoid and midpoint.
        t_prev = linalg::scale(&linalg::add(&t_prev, &m), 0.5);
        s_prev = Some(s);
        n *= 2;
    }
    Err(Error::QuadratureDiverged {
        a,
        b,
        halvings: MAX_HALVINGS,
    })
}

/// Scalar convenience wrapper around [`simpson`].
pub fn simpson_scalar<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    simpson(|t| alloc::vec![f(t)], a, b, 1, tol).map(|v| v[0])
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `points` nodes.
///
/// Used for integrands that are smooth but extremely flat at the ends
/// (bump functions), where 32×12 nodes reach ~1e-14.
#[derive(Clone, Debug)]
pub struct CompositeGauss {
    panels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeGauss {
    pub fn new(panels: usize, points: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        Self {
            panels,
            nodes,
            weights,
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        self.for_each_node(a, b, |x, w| total += w * f(x));
        total
    }

    pub fn integrate_vector<F: Fn(f64) -> Vector>(&self, f: F, a: f64, b: f64, dim: usize) -> Vector {
        let mut total = linalg::zeros(dim);
        self.for_each_node(a, b, |x, w| linalg::axpy(&mut total, w, &f(x)));
        total
    }

    /// Visits every `(node, weight)` pair of the rule mapped to `[a, b]`.
    pub fn for_each_node<F: FnMut(f64, f64)>(&self, a: f64, b: f64, mut f: F) {
        if a == b {
            return;
        }
        let width = (b - a) / self.panels as f64;
        for p in 0..self.panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                f(mid + 0.5 * width * x, 0.5 * width * w);
            }
        }
    }
}

impl Default for CompositeGauss {
    fn default() -> Self {
        Self::new(32, 12)
    }
}
