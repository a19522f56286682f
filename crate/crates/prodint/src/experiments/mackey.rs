use prodint_core::evolution;
use prodint_core::random;
use prodint_core::smoothing::{self, MackeySchedule};

use super::{indexed, per_sample, Context};
use crate::descriptor::BuiltCurve;
use crate::error::CliError;
use crate::report::{CheckRow, RunReport};

/// Largest interior-derivative order compared at breakpoints.
const JUMP_ORDER: usize = 4;

fn smoothing_sample(ctx: &Context<'_>, i: usize) -> Result<Vec<CheckRow>, CliError> {
    let g = &ctx.group;
    let mut rng = ctx.rng(i);
    let check = indexed("smoothing.endpoint", i);
    let pw = match ctx.curves.get(i) {
        Some(BuiltCurve::Piecewise(p)) => p.clone(),
        Some(c) => c.as_piecewise(),
        None => random::piecewise_curve(&mut rng, ctx.dim(), 0.0, 1.0, 3, false, ctx.scale()).map_err(|e| CliError::numeric(&check, e))?,
    };
    let psi = smoothing::smooth_piecewise(&pw).map_err(|e| CliError::numeric(&check, e))?;
    let rough = evolution::evolve_piecewise(g, &pw, &ctx.evolve).map_err(|e| CliError::numeric(&check, e))?;
    let smooth = evolution::evolve(g, &psi, &ctx.evolve).map_err(|e| CliError::numeric(&check, e))?;
    let d = g.chart_distance(&rough.endpoint, &smooth.endpoint).value;
    Ok(vec![
        ctx.row(check, d, ctx.estimate_tolerance(rough.error_estimate + smooth.error_estimate)),
        ctx.row(indexed("smoothing.jumps", i), smoothing::breakpoint_jumps(&pw, JUMP_ORDER), ctx.cfg.tolerances.jumps),
    ])
}

fn mackey_rows(ctx: &Context<'_>) -> Result<Vec<CheckRow>, CliError> {
    let g = &ctx.group;
    let (n, c) = (ctx.cfg.params.mackey_n, ctx.cfg.params.decay);
    if n == 0 || !(c > 0.0) {
        return Err(CliError::Schema("fields `params.mackey_n`, `params.decay`: must be positive".into()));
    }
    let check = "mackey.distance";
    let mut rng = ctx.rng(usize::MAX);
    let g0 = g.exp(&g.random_algebra(&mut rng, 0.5));
    let seq = MackeySchedule::decaying(g, g0, n, c, &mut rng).map_err(|e| CliError::numeric(check, e))?;
    let op = g.operator_seminorm();
    let ratio = (1..=n)
        .map(|k| op.eval(seq.increment(k)) / (c * 2f64.powi(-((k * k) as i32))))
        .fold(0.0, f64::max);
    let phi = smoothing::mackey_glue(&seq, n, c).map_err(|e| CliError::numeric(check, e))?;
    // each glue segment gets the same number of steps
    let mut endpoint = g.identity();
    for k in 1..=n {
        let (a, b) = (MackeySchedule::breakpoint(k), MackeySchedule::breakpoint(k + 1));
        let mut cfg = ctx.evolve.clone().without_estimate();
        cfg.h *= b - a;
        let seg = phi.restrict(a, b).map_err(|e| CliError::numeric(check, e))?;
        let evo = evolution::evolve(g, &seg, &cfg).map_err(|e| CliError::numeric(check, e))?;
        endpoint = g.mul(&evo.endpoint, &endpoint);
    }
    // g_N⁻¹·g₀ straight from the sequence
    let els = seq.elements();
    let oracle = g.quotient(&els[n], &els[0]);
    Ok(vec![
        ctx.row("mackey.decay", ratio, 1.0),
        ctx.row(check, g.chart_distance(&endpoint, &oracle).value, ctx.cfg.tolerances.mackey),
    ])
}

pub fn run(ctx: &Context<'_>) -> Result<RunReport, CliError> {
    let mut rows = per_sample(ctx.count(), |i| smoothing_sample(ctx, i))?;
    rows.extend(mackey_rows(ctx)?);
    Ok(super::plain(rows))
}
