use prodint_core::calculus::{self, CalculusConfig, ParamFamily, SLOPE_STEPS};
use prodint_core::{linalg, Curve, Error};

use super::{indexed, per_sample, plain, Context};
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

fn duhamel_sample(ctx: &Context<'_>, cc: &CalculusConfig, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let tol = &ctx.cfg.tolerances;
    let mut rng = ctx.rng(i);
    let path = ctx.curve(i, &mut rng, 0.0, 2.0)?;
    let x = ctx.cfg.params.x.unwrap_or(0.5 * (path.start() + path.end()));
    let check = indexed("duhamel", i);
    let r = calculus::duhamel(&ctx.group, &path, x, cc).map_err(|e| CliError::numeric(&check, e))?;
    Ok(vec![
        ctx.row(indexed("duhamel.closed", i), r.gap_closed, tol.duhamel),
        ctx.row(indexed("duhamel.forms", i), r.gap_forms, tol.duhamel_forms),
        ctx.row(indexed("duhamel.integral", i), r.gap_integral, tol.duhamel),
    ])
}

pub fn run_duhamel(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let cc = CalculusConfig::default();
    per_sample(ctx.count(), |i| duhamel_sample(ctx, &cc, i)).map(plain)
}

/// `A + xB + x²C + x³D`; the cubic term keeps central differences inexact.
fn family(parts: [Curve; 4]) -> Result<ParamFamily, Error> {
    let [a, b, c, d] = parts;
    let (start, end, dim) = (a.start(), a.end(), a.dim());
    let (b2, c2, d2) = (b.clone(), c.clone(), d.clone());
    Ok(ParamFamily::new(start, end, dim, move |x, t| {
        let mut v = a.eval(t);
        linalg::axpy(&mut v, x, &b.eval(t));
        linalg::axpy(&mut v, x * x, &c.eval(t));
        linalg::axpy(&mut v, x * x * x, &d.eval(t));
        v
    })?
    .with_partial(move |x, t| {
        let mut v = b2.eval(t);
        linalg::axpy(&mut v, 2.0 * x, &c2.eval(t));
        linalg::axpy(&mut v, 3.0 * x * x, &d2.eval(t));
        v
    }))
}

fn param_sample(ctx: &Context<'_>, cc: &CalculusConfig, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let (g, tol) = (&ctx.group, &ctx.cfg.tolerances);
    let x = ctx.cfg.params.x.unwrap_or(0.2);
    let mut rng = ctx.rng(i);
    let mut rows = Vec::new();

    let check = indexed("param.family", i);
    let mut parts = Vec::with_capacity(4);
    for k in 0..4 {
        parts.push(ctx.curve(4 * i + k, &mut rng, 0.0, 1.0)?);
    }
    let parts: [Curve; 4] = parts.try_into().map_err(|_| CliError::numeric(&check, "family needs four curves"))?;
    let fam = family(parts).map_err(|e| CliError::numeric(&check, e))?.with_lipschitz("euclidean", 0, 100.0);
    match fam.check_hypotheses(g, x) {
        Ok(()) => {
            let check = indexed("param.gap", i);
            let r = calculus::param_derivative(g, &fam, x, cc).map_err(|e| CliError::numeric(&check, e))?;
            rows.push(ctx.row(check, r.gap, tol.param_derivative));
            let check = indexed("param.fd_slope", i);
            let (_, slope) = calculus::param_gap_slope(g, &fam, x, &SLOPE_STEPS, cc).map_err(|e| CliError::numeric(&check, e))?;
            rows.push(ctx.row_at_least(check, slope, tol.fd_slope));
        }
        Err(Error::HypothesisViolation { value, bound, .. }) => {
            rows.push(ctx.row(indexed("param.hypotheses", i), value, bound));
        }
        Err(e) => return Err(CliError::numeric(indexed("param.hypotheses", i), e)),
    }

    let psi = ctx.curve(4 * i + 4, &mut rng, 0.0, 1.0)?;
    let check = indexed("param.directional", i);
    let r = calculus::directional_derivative_at_zero(g, &psi, cc).map_err(|e| CliError::numeric(&check, e))?;
    rows.push(ctx.row(check, r.gap, tol.directional));
    let check = indexed("param.evol_differential", i);
    let zero = Curve::zero(psi.start(), psi.end(), ctx.dim()).map_err(|e| CliError::numeric(&check, e))?;
    let d = calculus::evol_differential(g, &zero, &psi, cc).map_err(|e| CliError::numeric(&check, e))?;
    rows.push(ctx.row(check, linalg::max_abs(&linalg::sub(&d.left_trivialized, &r.formula)), tol.chain));
    Ok(rows)
}

pub fn run_param(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let cc = CalculusConfig::default();
    per_sample(ctx.count(), |i| param_sample(ctx, &cc, i)).map(plain)
}
