use prodint_core::lcvs::{self, FourierTerm};
use prodint_core::random::{self, Rng64};
use prodint_core::{linalg, Curve, Error, Seminorm};
use rand::Rng;

use super::{indexed, per_sample, plain, Context};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

const GRID: usize = 129;
const CONVOLUTION_GRID: usize = 257;

/// `φ⁽ᵖ⁾` as a curve.
fn derivative_curve(phi: &Curve, p: usize) -> Result<Curve, Error> {
    let c = phi.clone();
    Curve::new(phi.start(), phi.end(), phi.dim(), phi.order().minus(p), move |t, s| {
        c.jet(t, s + p).map(|j| j[p..].to_vec()).unwrap_or_else(|_| vec![vec![f64::NAN; c.dim()]; s + 1])
    })
}

fn sup_distance(a: &Curve, b: &Curve, grid: usize) -> f64 {
    (0..grid)
        .map(|k| {
            let t = a.start() + a.length() * k as f64 / (grid - 1) as f64;
            linalg::norm(&linalg::sub(&a.eval(t), &b.eval(t)))
        })
        .fold(0.0, f64::max)
}

/// `a·u₁·t + (1 − a)·u₂·sin(ωt + θ)/ω` with unit `uᵢ`: Lipschitz constant ≤ 1.
fn lipschitz_one(rng: &mut Rng64, dim: usize) -> Result<Curve, Error> {
    let a: f64 = rng.gen_range(0.0..1.0);
    let w: f64 = rng.gen_range(1.0..20.0);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let u1 = random::unit_vector(rng, dim);
    let u2 = linalg::scale(&random::unit_vector(rng, dim), (1.0 - a) / w);
    Curve::fourier(
        0.0,
        1.0,
        vec![vec![0.0; dim], linalg::scale(&u1, a)],
        vec![FourierTerm {
            frequency: w,
            cos: linalg::scale(&u2, theta.sin()),
            sin: linalg::scale(&u2, theta.cos()),
        }],
    )
}

fn sample(ctx: &Context<'_>, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let tol = &ctx.cfg.tolerances;
    let params = &ctx.cfg.params;
    let dim = ctx.dim();
    let p = 1 + i % params.p_max.max(1);
    let mut rng = ctx.rng(i);
    let mut rows = Vec::new();

    // reconstruction of a polynomial from its initial jet and top derivative
    let check = indexed(&format!("approx.reconstruct.p{p}"), i);
    let fail = |e: Error| CliError::numeric(&check, e);
    let phi = if ctx.curves.is_empty() {
        random::polynomial_curve(&mut rng, dim, p + 2, 0.0, 1.0, 1.0).map_err(fail)?
    } else {
        ctx.curve(i, &mut rng, 0.0, 1.0)?
    };
    let jet = phi.jet(phi.start(), p - 1).map_err(fail)?;
    let xs: Vec<_> = jet.into_iter().rev().collect();
    let top = derivative_curve(&phi, p).map_err(fail)?;
    let rebuilt = lcvs::iterated_integrate(&xs, &top).map_err(fail)?;
    rows.push(ctx.row(check.clone(), sup_distance(&rebuilt, &phi, GRID), tol.iterated));

    // q∞(I[p](0, …, 0, φ)) ≤ max(1, |r' − r|)ᵖ·q∞(φ)
    let check = indexed(&format!("approx.iterated_bound.p{p}"), i);
    let fail = |e: Error| CliError::numeric(&check, e);
    let len: f64 = rng.gen_range(0.25..2.5);
    let phi = random::analytic_curve(&mut rng, dim, 0.0, len, 1.0).map_err(fail)?;
    let lifted = lcvs::iterated_integrate(&vec![vec![0.0; dim]; p], &phi).map_err(fail)?;
    let q = Seminorm::Euclidean;
    let lhs = lcvs::ck_seminorm(&lifted, &q, 0, GRID).map_err(fail)?.value;
    let rhs = len.max(1.0).powi(p as i32) * lcvs::ck_seminorm(&phi, &q, 0, GRID).map_err(fail)?.value;
    rows.push(ctx.row(check.clone(), lhs, rhs));

    // mollifier convolution error on a Lipschitz-1 curve
    if !params.convolution_n.is_empty() {
        let n = params.convolution_n[i % params.convolution_n.len()];
        let check = indexed(&format!("approx.convolution.n{n:04}"), i);
        let fail = |e: Error| CliError::numeric(&check, e);
        let c = lipschitz_one(&mut rng, dim).map_err(fail)?;
        let smooth = lcvs::convolve(&c, n).map_err(fail)?;
        rows.push(ctx.row(check.clone(), sup_distance(&smooth, &c, CONVOLUTION_GRID), 1.0 / n as f64));
    }
    Ok(rows)
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    if ctx.cfg.params.p_max == 0 {
        return Err(CliError::Schema("field `params.p_max`: must be at least 1".into()));
    }
    if ctx.cfg.params.convolution_n.contains(&0) {
        return Err(CliError::Schema("field `params.convolution_n`: entries must be positive".into()));
    }
    per_sample(ctx.count(), |i| sample(ctx, i)).map(plain)
}
